#include "doctest.h"
#include "oracles.hpp"

#include "subfp/artifacts.hpp"
#include "subfp/config.hpp"
#include "subfp/experiment.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

using namespace subfp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("subfp-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.L = 20.0;
  c.n = 256;
  c.t_end = 200.0;
  c.tasks = {"steady"};
  return c;
}

ExperimentConfig random_config(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> n(8, 5000);
  const char* alphabet = "ab \"\\#=[],\t_x";
  auto str = [&] {
    std::string s;
    for (int k = n(rng) % 12; k > 0; --k) s += alphabet[n(rng) % 13];
    return s;
  };
  ExperimentConfig c;
  c.field_kind = str();
  c.gamma = u(rng);
  c.scale = 1e-3 + 1e3 * u(rng);
  c.amplitude = -5 + 10 * u(rng);
  c.modulation = u(rng) < 0.5 ? 0.0 : u(rng);
  c.R0 = 1.0 / (u(rng) + 1e-9);
  c.F1 = str();
  c.F2 = str();
  c.dim = 1 + n(rng) % 2;
  c.L = 1e-5 + 1e5 * u(rng);
  c.n = n(rng);
  c.p = u(rng) < 0.2 ? kInfinity : 1 + 5 * u(rng);
  c.family = str();
  c.k = 10 * u(rng);
  c.kappa = u(rng);
  c.s = u(rng) * 1e-300;
  c.theta = u(rng);
  c.initial_kind = str();
  c.center = -u(rng);
  c.center_y = u(rng);
  c.width = 0.1 + u(rng);
  c.exponent = 1 + u(rng);
  c.initial_path = str();
  c.mean_zero = u(rng) < 0.5;
  c.t_first = 1e-4 * u(rng);
  c.t_end = 1e6 * u(rng);
  c.t_ratio = 1 + u(rng);
  c.dt = u(rng) / 3;
  c.envelope = str();
  c.fit_norm = str();
  c.sigma = u(rng);
  c.burn_fraction = u(rng);
  c.beta_factor = u(rng);
  c.min_r2 = u(rng);
  c.spectrum_count = n(rng);
  c.a_factor = u(rng);
  c.scan_radius = 1e9 * u(rng);
  c.scan_points = n(rng);
  c.lyap_kappa = u(rng);
  c.lyap_zeta0 = u(rng);
  c.lyap_M = u(rng);
  c.lyap_R = u(rng);
  c.tasks.clear();
  for (int k = n(rng) % 4; k > 0; --k) c.tasks.push_back(str());
  c.output = str();
  c.seed = static_cast<unsigned>(rng());
  return c;
}

}  // namespace

TEST_CASE("config round trip") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const ExperimentConfig c = random_config(rng);
    const std::string text = serialize_config(c);
    const ExperimentConfig back = parse_config(text);
    CHECK(back == c);
    CHECK(serialize_config(back) == text);
    CHECK(config_hash(back) == config_hash(c));
  }
  CHECK(parse_config(serialize_config(ExperimentConfig())) == ExperimentConfig());
}

TEST_CASE("config parsing errors name the key") {
  try {
    parse_config("grid.n = 64\nfield.gama = 0.5\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "field.gama");
  }
  CHECK_THROWS_AS(parse_config("grid.n = 64\ngrid.n = 32\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("grid.n = sixty\n"), ConfigError);
  const ExperimentConfig c = parse_config("# comment\ngrid.n = 1_024  # trailing\nnorm.p = inf\ntasks = [\"steady\", \"spectrum\"]\n");
  CHECK(c.n == 1024);
  CHECK(std::isinf(c.p));
  CHECK(c.tasks == std::vector<std::string>{"steady", "spectrum"});
}

TEST_CASE("validation") {
  ExperimentConfig c = small_config();
  CHECK_NOTHROW(validate_config(c));
  auto field_of = [](const ExperimentConfig& bad) {
    try {
      validate_config(bad);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  ExperimentConfig b = c;
  b.gamma = 1.2;
  CHECK(field_of(b) == "field.gamma");
  b = c;
  b.field_kind = "rotated";
  CHECK(field_of(b) == "field.kind");
  b = c;
  b.tasks = {"steady", "nope"};
  CHECK(field_of(b) == "tasks");
  b = c;
  b.burn_fraction = 1.0;
  CHECK(field_of(b) == "fit.burn_fraction");
}

TEST_CASE("invalid config writes nothing") {
  ExperimentConfig c = small_config();
  c.gamma = 1.2;
  const fs::path dir = scratch("invalid");
  try {
    run_experiment(c, dir);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "field.gamma");
  }
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("run_experiment artifacts") {
  SUBCASE("steady only") {
    const fs::path dir = scratch("steady");
    const ExperimentResult r = run_experiment(small_config(), dir);
    CHECK(r.all_pass());
    CHECK(fs::exists(dir / "G.csv"));
    CHECK(fs::exists(dir / "steady.json"));
    CHECK(fs::exists(dir / "config.toml"));
    CHECK(parse_config(slurp(dir / "config.toml")) == small_config());
    const Json s = read_json(dir / "summary.json");
    CHECK(s["config_hash"] == config_hash(small_config()));
    CHECK(s["all_pass"] == true);
    std::vector<std::string> header;
    const auto rows = read_csv(dir / "G.csv", &header);
    CHECK(rows.size() == 256);
    double mass = 0.0;
    for (const auto& row : rows) mass += row.back() * 40.0 / 256;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    const std::string report = emit_report(dir);
    CHECK(report.find(config_hash(small_config())) != std::string::npos);
    CHECK(report.find("sigma*_B") != std::string::npos);
  }
  SUBCASE("decay fit") {
    ExperimentConfig c = small_config();
    c.tasks = {"steady", "decay-fit"};
    c.center = 3.0;
    c.p = 2.0;
    c.family = "critical";
    c.kappa = 0.8;
    c.theta = 0.5;
    c.t_end = 2e3;
    const fs::path dir = scratch("fit");
    run_experiment(c, dir);
    const Json f = read_json(dir / "decay_fit.json");
    CHECK(f["lambda_hat"].get<double>() > 0.0);
    CHECK(fs::exists(dir / "decay.csv"));
    CHECK(fs::exists(dir / "decay.svg"));
  }
  SUBCASE("splitting appears in the report") {
    ExperimentConfig c = small_config();
    c.tasks = {"splitting-scan"};
    c.p = 2.0;
    c.k = 2.0;
    const fs::path dir = scratch("split");
    CHECK(run_experiment(c, dir).all_pass());
    const std::string report = emit_report(dir);
    CHECK(report.find("M =") != std::string::npos);
    CHECK(report.find("R =") != std::string::npos);
  }
  CHECK_THROWS(emit_report(scratch("empty")));
}

TEST_CASE("determinism") {
  ExperimentConfig c = small_config();
  c.tasks = {"steady", "spectrum", "entropy"};
  c.center = 2.0;
  const fs::path a = scratch("det-a"), b = scratch("det-b");
  run_experiment(c, a);
  run_experiment(c, b);
  int compared = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    REQUIRE(fs::exists(b / e.path().filename()));
    CHECK_MESSAGE(slurp(e.path()) == slurp(b / e.path().filename()), e.path().filename().string());
    ++compared;
  }
  CHECK(compared >= 5);
}

TEST_CASE("experiment_dir") {
  ExperimentConfig c;
  ::setenv("SUBFP_OUT", "/tmp/root-x", 1);
  CHECK(experiment_dir(c, "stem") == fs::path("/tmp/root-x/stem"));
  c.output = "named";
  CHECK(experiment_dir(c, "stem") == fs::path("/tmp/root-x/named"));
  ::unsetenv("SUBFP_OUT");
  CHECK(experiment_dir(c) == fs::path("subfp-out/named"));
  c.output.clear();
  CHECK(experiment_dir(c).filename() == "run-" + config_hash(c));
}

TEST_CASE("csv and svg") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-INFINITY) == "-inf");
  const fs::path p = scratch("csv") += ".csv";
  const std::vector<std::vector<double>> rows{{1.0, 1e-300}, {-2.5, 0.1}};
  write_csv(p, {"x,1", "y"}, rows);
  CHECK(slurp(p).find("\r\n") != std::string::npos);
  std::vector<std::string> header;
  CHECK(read_csv(p, &header) == rows);
  CHECK(header == std::vector<std::string>{"x,1", "y"});
  const std::string svg = svg_line_plot("t<1>", "x", "y", {{"a&b", {0, 1, 2}, {1, NAN, 3}, false}});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("t&lt;1&gt;") != std::string::npos);
  CHECK(svg.find("a&amp;b") != std::string::npos);
  CHECK(json_number(NAN).is_string());
}

TEST_CASE("subfp binary") {
  const fs::path root = scratch("bin");
  const fs::path cfgdir = scratch("bin-configs");
  fs::create_directories(cfgdir);
  const std::string env = "SUBFP_OUT=" + root.string() + " ";
  const std::string bin = SUBFP_BIN;
  auto write_cfg = [&](const std::string& name, const ExperimentConfig& c) {
    write_text(cfgdir / name, serialize_config(c));
  };
  ExperimentConfig c = small_config();
  c.output = "same-name";
  write_cfg("a.toml", c);
  c.tasks = {"steady", "spectrum"};
  write_cfg("b.toml", c);

  CHECK(std::system((env + bin + " run " + (cfgdir / "a.toml").string() + " > /dev/null").c_str()) == 0);
  CHECK(fs::exists(root / "same-name" / "summary.json"));
  CHECK(std::system((env + bin + " report " + (root / "same-name").string() + " > /dev/null").c_str()) == 0);

  CHECK(std::system((env + bin + " sweep " + cfgdir.string() + " --jobs 2 > /dev/null").c_str()) == 0);
  CHECK(fs::exists(root / "a" / "summary.json"));
  CHECK(fs::exists(root / "b" / "spectrum.json"));
  CHECK_FALSE(fs::exists(root / "a" / "spectrum.json"));

  c.gamma = 1.2;
  c.output = "bad";
  write_cfg("bad.toml", c);
  const int rc = std::system((env + bin + " run " + (cfgdir / "bad.toml").string() + " > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(rc) == 2);
  CHECK_FALSE(fs::exists(root / "bad"));

  for (const char* name : {"steady_1d.toml", "rotated_2d.toml"})
    CHECK(parse_config(slurp(fs::path(SUBFP_CONFIGS) / name)).tasks.size() >= 1);
}
