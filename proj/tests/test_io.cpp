#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "mo/io.hpp"
#include "mo/rng.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mo_io_test_" + std::to_string(std::uintptr_t(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("space csv") {
  TempDir dir;

  SECTION("weights plus exponent column") {
    write(dir.path / "s.csv", "atom_id,weight,p\na0,0.25,1.5\na1,0.75,3\n");
    const mo::SpaceTable st = mo::load_space_csv((dir.path / "s.csv").string());
    REQUIRE(st.space.size() == 2);
    REQUIRE(st.space.ids[1] == "a1");
    REQUIRE(st.space.weights[0] == 0.25);
    REQUIRE(st.p.has_value());
    REQUIRE((*st.p)[1] == 3.0);
    REQUIRE(!st.value.has_value());
  }

  SECTION("value column and comments") {
    write(dir.path / "f.csv", "# a function\natom_id,weight,value\na,1,-2.5\n");
    const mo::SpaceTable st = mo::load_space_csv((dir.path / "f.csv").string());
    REQUIRE(st.value.has_value());
    REQUIRE((*st.value)[0] == -2.5);
  }

  SECTION("errors carry file and line") {
    write(dir.path / "bad.csv", "atom_id,weight\na,1\nb,not_a_number\n");
    try {
      mo::load_space_csv((dir.path / "bad.csv").string());
      FAIL("expected ParseError");
    } catch (const mo::ParseError& e) {
      REQUIRE(std::string(e.what()).find(":3") != std::string::npos);
    }
    write(dir.path / "hdr.csv", "id,weight\na,1\n");
    REQUIRE_THROWS_AS(mo::load_space_csv((dir.path / "hdr.csv").string()), mo::ParseError);
  }

  SECTION("round trip") {
    const auto space = mo::AtomicMeasureSpace({"x", "y"}, {0.125, 2.0});
    const std::vector<double> p{1.5, 3.0};
    std::ostringstream os;
    mo::write_space_csv(os, space, &p, "p");
    write(dir.path / "rt.csv", os.str());
    const mo::SpaceTable st = mo::load_space_csv((dir.path / "rt.csv").string());
    REQUIRE(st.space.ids == space.ids);
    REQUIRE(st.space.weights == space.weights);
    REQUIRE(*st.p == p);
  }
}

TEST_CASE("flat key-value config") {
  TempDir dir;
  write(dir.path / "c.txt",
        "# experiment\nspace = s.csv\nseed = 42\ngrid_min = 1e-3\np = 1.5, 3\nflag = true\n");
  const auto cfg = mo::KeyValueConfig::load((dir.path / "c.txt").string());

  REQUIRE(cfg.get_string("space") == "s.csv");
  REQUIRE(cfg.get_long("seed") == 42);
  REQUIRE(cfg.get_double("grid_min") == 1e-3);
  REQUIRE(cfg.get_double_list("p") == std::vector<double>{1.5, 3.0});
  REQUIRE(cfg.get_bool("flag", false));
  REQUIRE(cfg.get_double("missing", 7.0) == 7.0);

  SECTION("missing required key names the file") {
    try {
      cfg.get_string("nope");
      FAIL("expected ParseError");
    } catch (const mo::ParseError& e) {
      REQUIRE(std::string(e.what()).find("nope") != std::string::npos);
    }
  }

  SECTION("type errors carry the line number") {
    try {
      cfg.get_long("grid_min");
      FAIL("expected ParseError");
    } catch (const mo::ParseError& e) {
      REQUIRE(std::string(e.what()).find(":4") != std::string::npos);
    }
  }

  SECTION("unknown keys are flagged") {
    REQUIRE_THROWS_AS(cfg.check_known_keys({"space", "seed", "grid_min", "p"}), mo::ParseError);
    REQUIRE_NOTHROW(cfg.check_known_keys({"space", "seed", "grid_min", "p", "flag"}));
  }

  SECTION("duplicates and malformed lines are rejected") {
    write(dir.path / "dup.txt", "a = 1\na = 2\n");
    REQUIRE_THROWS_AS(mo::KeyValueConfig::load((dir.path / "dup.txt").string()),
                      mo::ParseError);
    write(dir.path / "bad.txt", "just some text\n");
    REQUIRE_THROWS_AS(mo::KeyValueConfig::load((dir.path / "bad.txt").string()),
                      mo::ParseError);
  }
}

TEST_CASE("martingale csv round trip") {
  const auto space = std::make_shared<const mo::OrliczSpace>(
      mo::AtomicMeasureSpace::uniform(2), mo::YoungFunction::variable_exponent({1.5, 3.0}));
  const auto f = mo::random_martingale(space, 4, 1.0, 77);

  std::ostringstream os;
  mo::write_martingale_csv(os, f);
  const std::string text = os.str();
  REQUIRE(text.rfind("level,address", 0) == 0);
  REQUIRE(text.find("\n0,,") != std::string::npos);    // root row, empty address
  REQUIRE(text.find(",++++,") != std::string::npos);   // deepest plus path

  std::istringstream is(text);
  const auto g = mo::read_martingale_csv(is, space);
  REQUIRE(g.depth() == 4);
  for (int k = 0; k <= 4; ++k)
    for (std::uint32_t i = 0; i < (std::uint32_t(1) << k); ++i)
      for (std::size_t a = 0; a < 2; ++a)
        REQUIRE(g.value(k, i)[a] == Catch::Approx(f.value(k, i)[a]).margin(1e-9));
}

TEST_CASE("json records") {
  SECTION("norm result is flat") {
    mo::NormResult r;
    r.value = 0.5;
    r.iterations = 12;
    r.residual = 1e-13;
    r.tolerance = 1e-12;
    const auto j = mo::to_json(r);
    REQUIRE(j["value"] == 0.5);
    REQUIRE(j["iterations"] == 12);
    REQUIRE(j["converged"] == true);
  }

  SECTION("certificate record carries its grid summary") {
    const auto space = mo::AtomicMeasureSpace::uniform(2);
    const auto grid = mo::LambdaGrid{1e-2, 1e2, 40, true}.points();
    const auto cert =
        mo::estimate_delta2(mo::YoungFunction::power(2, 2.0), space, grid);
    const auto j = mo::to_json(cert);
    REQUIRE(j["K"] == 4.0);
    REQUIRE(j["grid_count"] == 40);
    REQUIRE(j["valid"] == true);
  }

  SECTION("dump is deterministic") {
    nlohmann::json a{{"b", 1.5}, {"a", "x"}};
    nlohmann::json b{{"a", "x"}, {"b", 1.5}};
    REQUIRE(a.dump() == b.dump());
  }

  SECTION("the constants table is human-readable and complete") {
    const auto out = mo::variable_lebesgue_report(std::vector<double>{1.5, 3.0},
                                                  std::vector<double>{2.0});
    const std::string table = mo::constants_table(out.report);
    REQUIRE(table.find("K_phi") != std::string::npos);
    REQUIRE(table.find("C_KX") != std::string::npos);
    REQUIRE(table.find("beta_2") != std::string::npos);
    REQUIRE(table.find("closing-remark") != std::string::npos);
    REQUIRE(table.find("p_-'") != std::string::npos);
  }
}

TEST_CASE("checksums and formatting") {
  SECTION("fnv1a64 reacts to any flip") {
    const std::string payload = "{\"certified\":true}";
    REQUIRE(mo::fnv1a64(payload) != mo::fnv1a64("{\"certified\":false}"));
    REQUIRE(mo::fnv1a64(payload) == mo::fnv1a64(payload));
  }

  SECTION("fmt_double round-trips") {
    mo::Rng rng(1);
    for (int i = 0; i < 200; ++i) {
      const double x = (rng.symmetric()) * std::pow(10.0, rng.uniform(-20.0, 20.0));
      REQUIRE(std::stod(mo::fmt_double(x)) == x);
    }
  }
}
