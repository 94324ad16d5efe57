#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "mudomains/cli/commands.hpp"
#include "mudomains/cli/map_spec.hpp"
#include "mudomains/cli/output.hpp"
#include "mudomains/cli/suites.hpp"

using namespace mudomains;
using namespace mudomains::cli;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
  json envelope() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / ("mudomains_test_cli_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("numbers accept pi forms") {
  CHECK(parse_number("0.25") == 0.25);
  CHECK(parse_number("-1e-3") == -1e-3);
  CHECK(parse_number("pi") == doctest::Approx(kPi));
  CHECK(parse_number("-pi/2") == doctest::Approx(-kPi / 2));
  CHECK(parse_number("3pi/4") == doctest::Approx(3 * kPi / 4));
  CHECK(parse_number("2*pi") == doctest::Approx(kTwoPi));
  CHECK_THROWS_AS(parse_number("pie"), Error);
  CHECK_THROWS_AS(parse_number(""), Error);
}

TEST_CASE("map specs parse into the expected maps") {
  auto f = parse_map_spec("aut g2 h=mobius(pi,0,0)");
  auto y = evaluate(f, to_domain_point(SymPoint2{0.5, 0.1}));
  CHECK(std::abs(y.z[0] + 0.5) < 1e-15);
  CHECK(std::abs(y.z[1] - 0.1) < 1e-15);

  f = parse_map_spec("symlift g2 g=blaschke(1,0,0,0)");
  y = evaluate(f, to_domain_point(SymPoint2{0.0, -0.25}));
  CHECK(std::abs(y.z[0] - 0.5) < 1e-14);
  CHECK(std::abs(y.z[1] - 0.0625) < 1e-14);

  f = parse_map_spec("aut tetra F");
  y = evaluate(f, to_domain_point(TetraPoint{0.1, 0.2, 0.3}));
  CHECK(std::abs(y.z[0] - 0.2) < 1e-15);
  CHECK(std::abs(y.z[1] - 0.1) < 1e-15);

  f = parse_map_spec("aut penta omega=(1,0) gamma=mobius(0,-0.5,0)");
  y = evaluate(f, DomainPoint{Domain::Penta, {}});
  CHECK(std::abs(y.z[1] - 1.0) < 1e-15);
  CHECK(std::abs(y.z[2] - 0.25) < 1e-15);

  f = parse_map_spec("chain[aut g2 h=rot(pi/2); const g2 0.1 0 0 0]");
  CHECK(f.atoms.size() == 2);
  y = evaluate(f, to_domain_point(SymPoint2{0.3, 0.0}));
  CHECK(std::abs(y.z[0] - 0.1) < 1e-15);
}

TEST_CASE("bad map specs are rejected") {
  CHECK_THROWS_AS(parse_map_spec(""), Error);
  CHECK_THROWS_AS(parse_map_spec("aut g4 h=id"), Error);
  CHECK_THROWS_AS(parse_map_spec("aut g2 h=mobius(0,1,0)"), Error);
  CHECK_THROWS_AS(parse_map_spec("chain[aut g2 h=id"), Error);
  CHECK_THROWS_AS(parse_map_spec("symlift tetra g=scale(0.5,0)"), Error);
  try {
    parse_map_spec("aut g2 h=mobius(0,1,0)");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }
}

TEST_CASE("map specs round trip exactly") {
  const std::vector<std::string> specs{
      "id g3",
      "aut g2 h=paper(0.6,0.8,0.1,-0.3)",
      "aut g3 h=mobius(1.1,0.2,0.4)",
      "aut tetra L(0.3,0.1,-0.2) R(mobius(2,0.5,0)) F",
      "aut penta omega=(0,1) gamma=rot(0.3)",
      "symlift g3 g=scale(0.5,0.1)>blaschke(0,1,0.2,0.2)>mobius(0.1,0.3,0)",
      "route g2 out=phi(0,1) g=mobius(0,-0.5,0) in=form2(mobius(0,-0.5,0))",
      "route tetra out=x3 g=scale(0.9,0) in=triangular(0.2,0.1)",
      "route penta out=a g=id in=penta-base(0.1,0)",
      "chain[aut g2 h=id; route g2 out=half-s g=id in=form1(1,0,0.3,0)]",
  };
  for (const auto& text : specs) {
    CAPTURE(text);
    const auto f = parse_map_spec(text);
    const auto canon = format_map_spec(f);
    const auto g = parse_map_spec(canon);
    CHECK(format_map_spec(g) == canon);
    Rng rng(61);
    for (int i = 0; i < 20; ++i) {
      const auto z = sample_interior(f.domain, rng, 0.8);
      CHECK(max_dist(evaluate(f, z), evaluate(g, z)) == 0.0);
    }
  }
}

TEST_CASE("orbit csv round trips") {
  const auto f = parse_map_spec("aut g2 h=mobius(0,-0.5,0)");
  const auto rec = iterate(f, DomainPoint{Domain::G2, {}});
  const auto csv = parse_orbit_csv(orbit_csv(rec));
  REQUIRE(csv.header == std::vector<std::string>{"step", "re0", "im0", "re1", "im1", "margin"});
  REQUIRE(csv.rows.size() == rec.points.size());
  for (std::size_t k = 0; k < rec.points.size(); ++k) {
    CHECK(csv.rows[k][0] == static_cast<double>(k));
    CHECK(csv.rows[k][1] == rec.points[k].z[0].real());
    CHECK(csv.rows[k][4] == rec.points[k].z[1].imag());
    CHECK(csv.rows[k][5] == rec.margins[k]);
  }
}

TEST_CASE("member: verdicts and exit codes") {
  auto r = run({"member", "g2", "0", "0", "-0.25", "0"});
  CHECK(r.code == kExitOk);
  auto env = r.envelope();
  CHECK(env["tool"] == "mudomains");
  CHECK(env["config"]["command"] == "member");
  CHECK(env["payload"]["status"] == "Inside");
  CHECK(env["payload"]["margin"].get<double>() == doctest::Approx(0.75).epsilon(1e-9));

  r = run({"member", "tetra", "0.5", "0", "0.5", "0", "0.25", "0"});
  CHECK(r.code == kExitOk);
  CHECK(r.envelope()["payload"]["margin"].get<double>() == doctest::Approx(0.375));

  CHECK(run({"member", "g2", "3", "0", "0", "0"}).code == kExitOutside);
  CHECK(run({"member", "g2", "2", "0", "1", "0"}).code == kExitBoundary);
  CHECK(run({"member", "g2", "0", "0"}).code == kExitUsage);
  CHECK(run({"member", "g7", "0", "0", "0", "0"}).code == kExitUsage);
  CHECK(run({"--format", "csv", "member", "g2", "0", "0", "0", "0"}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
}

TEST_CASE("config echo: seed, tolerances and environment") {
  auto r = run({"--seed", "17", "--tol-boundary", "0.001", "--n-max", "77", "member", "g3", "0", "0", "0", "0", "0", "0"});
  REQUIRE(r.code == kExitOk);
  auto cfg = r.envelope()["config"];
  CHECK(cfg["seed"] == 17);
  CHECK(cfg["tolerances"]["boundary"].get<double>() == 0.001);
  CHECK(cfg["tolerances"]["n_max"] == 77);
  CHECK(cfg["beta_variant"] == "paper");
  CHECK_FALSE(cfg.contains("workers"));

  ::setenv("MU_DOMAINS_SEED", "99", 1);
  r = run({"member", "g2", "0", "0", "0", "0"});
  CHECK(r.envelope()["config"]["seed"] == 99);
  r = run({"--seed", "3", "member", "g2", "0", "0", "0", "0"});
  CHECK(r.envelope()["config"]["seed"] == 3);
  ::setenv("MU_DOMAINS_SEED", "x1", 1);
  CHECK(run({"member", "g2", "0", "0", "0", "0"}).code == kExitUsage);
  ::unsetenv("MU_DOMAINS_SEED");

  CHECK(run({"--tol-nonsense", "1", "member", "g2", "0", "0", "0", "0"}).code == kExitUsage);
}

TEST_CASE("orbit: csv by default, json on request") {
  auto r = run({"orbit", "aut g2 h=mobius(0,-0.5,0)"});
  REQUIRE(r.code == kExitOk);
  const auto csv = parse_orbit_csv(r.out);
  REQUIRE_FALSE(csv.rows.empty());
  CHECK(std::abs(csv.rows.back()[1] - 2.0) < 1e-3);
  CHECK(r.err.find("BoundaryDivergent") != std::string::npos);

  r = run({"--format", "json", "orbit", "aut g2 h=rot(pi)", "--start", "0.5", "0", "0.1", "0"});
  REQUIRE(r.code == kExitOk);
  const auto env = r.envelope();
  CHECK(env["payload"]["verdict"]["tag"] == "Periodic");
  CHECK(env["payload"]["verdict"]["period"] == 2);

  CHECK(run({"orbit", "aut g2 h=rot(pi)", "--start", "3", "0", "0", "0"}).code == kExitData);
  CHECK(run({"orbit", "nonsense"}).code == kExitUsage);
}

TEST_CASE("fixset: -I gives the (0, p) retraction") {
  auto r = run({"fixset", "aut g2 h=mobius(pi,0,0)"});
  REQUIRE(r.code == kExitOk);
  const auto p = r.envelope()["payload"];
  CHECK(p["classification"] == "MinusI");
  CHECK(p["retract"] == true);
  r = run({"fixset", "aut g2 h=mobius(0,-0.5,0)"});
  CHECK(r.code == kExitPrecondition);
}

TEST_CASE("target: royal circle and precondition failures") {
  auto r = run({"target", "aut g2 h=mobius(0,-0.5,0)", "--starts", "4"});
  REQUIRE(r.code == kExitOk);
  const auto p = r.envelope()["payload"];
  CHECK(p["pass"] == true);
  CHECK(std::abs(angle_diff(p["theta"].get<double>(), 0.0)) < 1e-3);
  CHECK(run({"target", "aut g2 h=rot(0.5)"}).code == kExitPrecondition);
}

TEST_CASE("scan: envelopes do not depend on workers") {
  auto strip = [](Run r) {
    auto env = r.envelope();
    env.erase("timestamp");
    return env.dump();
  };
  const auto a = run({"--seed", "42", "--workers", "1", "scan", "g2", "random-aut", "40"});
  const auto b = run({"--seed", "42", "--workers", "4", "scan", "g2", "random-aut", "40"});
  REQUIRE(a.code == kExitOk);
  REQUIRE(b.code == kExitOk);
  CHECK(strip(a) == strip(b));
  const auto p = a.envelope()["payload"];
  CHECK(p["violations"].empty());
  CHECK(p["oracle_mismatches"].empty());
  CHECK(run({"scan", "g2", "sometimes", "10"}).code == kExitUsage);
}

TEST_CASE("--out writes the envelope atomically and notes go to stdout") {
  const auto dir = scratch_dir();
  const auto path = (dir / "member.json").string();
  auto r = run({"--out", path, "member", "g2", "0", "0", "0", "0"});
  REQUIRE(r.code == kExitOk);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto env = json::parse(buf.str());
  CHECK(env["payload"]["status"] == "Inside");
  CHECK(env["config"]["out"] == path);
  for (const auto& e : std::filesystem::directory_iterator(dir))
    CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
  CHECK(run({"--out", (dir / "missing" / "x.json").string(), "member", "g2", "0", "0", "0", "0"}).code == kExitIo);
  std::filesystem::remove_all(dir);
}

TEST_CASE("verify runs a small suite") {
  auto r = run({"verify", "fix-tetra", "--scale", "0.2"});
  CHECK(r.code == kExitOk);
  const auto p = r.envelope()["payload"];
  CHECK(p["pass"] == true);
  CHECK(p["results"].size() == 1);
  CHECK(run({"verify", "nope"}).code == kExitUsage);
  CHECK(expand_suite("wwd-all").size() == 4);
  CHECK(expand_suite("all").size() == suite_names().size());
}

TEST_CASE("exit codes for library errors") {
  CHECK(exit_code_for(ErrorCode::ParseError) == kExitUsage);
  CHECK(exit_code_for(ErrorCode::PointOutsideDomain) == kExitData);
  CHECK(exit_code_for(ErrorCode::NotDivergent) == kExitPrecondition);
  CHECK(exit_code_for(ErrorCode::AtomRangeViolation) == kExitAtomRange);
  CHECK(exit_code_for(ErrorCode::Singular) == kExitNumeric);
}
