#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cmc/cli.hpp"

using namespace cmc;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result twizzle(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("twizzle_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }
  static std::string slurp(const std::string& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SolveHelicoidLine) {
  const auto r = twizzle({"solve", "--space", "r3", "--H", "0", "--M", "0", "--m", "1", "-o", path("heli.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream f(path("heli.csv"));
  const auto c = io::read_curve(f);
  for (double u : {-1.0, 0.5}) EXPECT_NEAR(c(u).pos.imag(), 0.0, 1e-15);
  const auto j = nlohmann::json::parse(slurp(path("heli.csv.json")));
  EXPECT_EQ(j["spaceform"], "r3");
  EXPECT_EQ(j["seed"], 0);
}

TEST_F(Cli, SolveTorusKeepsRadius) {
  const auto r = twizzle({"solve", "--space", "s3", "--H", "0", "--C", "3.141592653589793", "--m", "1", "--start",
                          "0.7071067811865476", "-o", path("torus.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream f(path("torus.csv"));
  const auto c = io::read_curve(f);
  for (int i = 0; i <= 100; ++i) EXPECT_NEAR(std::abs(c(c.domain().at(i / 100.0)).pos), std::sqrt(0.5), 1e-8);
}

TEST_F(Cli, SolveUsageErrors) {
  EXPECT_EQ(twizzle({"solve", "--space", "r3", "--H", "0", "--M", "0"}).code, 2);
  EXPECT_EQ(twizzle({"solve", "--space", "r3", "--m", "1", "--H", "0", "--M", "0", "--C", "1"}).code, 2);
  EXPECT_EQ(twizzle({"solve", "--space", "s3", "--m", "1", "--C", "1"}).code, 2);
  EXPECT_EQ(twizzle({"solve", "--space", "r4", "--m", "1", "--M", "0"}).code, 2);
  EXPECT_EQ(twizzle({"frobnicate"}).code, 2);
  EXPECT_EQ(twizzle({}).code, 2);
}

TEST_F(Cli, SolveNumericFailures) {
  const auto r = twizzle({"solve", "--space", "r3", "--H", "1", "--M", "-2", "--m", "1", "-o", path("x.csv")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("EmptyLevelSet"), std::string::npos);
  EXPECT_EQ(twizzle({"solve", "--space", "s3", "--H", "0", "--C", "50", "--m", "1", "--start", "0.5"}).code, 3);
}

TEST_F(Cli, SolveThenCheckRoundTrip) {
  ASSERT_EQ(twizzle({"solve", "--space", "r3", "--H", "-0.5", "--M", "1", "--m", "1", "-o", path("s.csv")}).code, 0);
  const auto r = twizzle({"check", "--space", "r3", "--in", path("s.csv"), "--m", "1", "--H", "-0.5", "--report",
                          path("rep.csv")});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("verdict=CMC"), std::string::npos);
  const std::string rep = slurp(path("rep.csv"));
  EXPECT_EQ(rep.rfind("u,omega,closed_form,abs_diff", 0), 0u);
  EXPECT_NE(rep.find("# median_C="), std::string::npos);
}

TEST_F(Cli, SolveThenCheckCurvedSpaces) {
  ASSERT_EQ(twizzle({"solve", "--space", "h3", "--H", "1.5", "--C", "-2", "--m", "1", "--start", "1", "--length", "3", "-o",
                     path("h.csv")}).code,
            0);
  const auto r = twizzle({"check", "--space", "h3", "--in", path("h.csv"), "--m", "1", "--H", "1.5", "--samples", "20"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
}

TEST_F(Cli, CheckCylinderEstimatesH) {
  const auto r = twizzle({"check", "--curve", "circle", "--m", "1"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("H=1 "), std::string::npos) << r.out;
  const auto pos = r.out.find("max_dev=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LE(std::stod(r.out.substr(pos + 8)), 1e-9);
}

TEST_F(Cli, CheckPerturbedIsNonCmc) {
  const auto r = twizzle({"check", "--curve", "perturbed", "--eps", "0.1", "--m", "1", "--H", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("verdict=NON_CMC"), std::string::npos);
}

TEST_F(Cli, CheckInputErrors) {
  write("empty.csv", "");
  EXPECT_EQ(twizzle({"check", "--in", path("empty.csv"), "--m", "1"}).code, 2);
  write("hdr.csv", "u,gx,gy,dgx,dgy\n");
  EXPECT_EQ(twizzle({"check", "--in", path("hdr.csv"), "--m", "1"}).code, 2);
  EXPECT_EQ(twizzle({"check", "--in", path("missing.csv"), "--m", "1"}).code, 2);
  EXPECT_EQ(twizzle({"check", "--curve", "circle"}).code, 2);
  EXPECT_EQ(twizzle({"check", "--curve", "circle", "--in", path("x.csv"), "--m", "1"}).code, 2);
}

TEST_F(Cli, MeshCylinder) {
  const auto r = twizzle({"mesh", "--curve", "circle", "--m", "1", "--nu", "64", "--nv", "64", "-o", path("c.obj")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream f(path("c.obj"));
  std::string line;
  std::size_t v = 0, faces = 0;
  while (std::getline(f, line)) {
    if (line.rfind("v ", 0) == 0) {
      ++v;
      double x, y, z;
      std::istringstream(line.substr(2)) >> x >> y >> z;
      EXPECT_NEAR(std::hypot(x, y), 1.0, 1e-12);
    } else if (line.rfind("f ", 0) == 0) {
      ++faces;
    }
  }
  EXPECT_EQ(v, 4096u);
  EXPECT_EQ(faces, 2u * 63 * 63);
}

TEST_F(Cli, MeshTorusRawVerticesOnSphere) {
  ASSERT_EQ(twizzle({"mesh", "--space", "s3", "--curve", "torus", "--m", "1", "--nu", "20", "--nv", "20", "-o",
                     path("t.obj")}).code,
            0);
  std::ifstream f(path("t.obj.4d.csv"));
  std::string line;
  std::getline(f, line);
  int n = 0;
  while (std::getline(f, line)) {
    std::vector<double> c;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) c.push_back(std::stod(cell));
    ASSERT_EQ(c.size(), 4u);
    EXPECT_NEAR(c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3], 1.0, 1e-12);
    ++n;
  }
  EXPECT_EQ(n, 400);
}

TEST_F(Cli, MeshDegenerateRange) {
  EXPECT_EQ(twizzle({"mesh", "--curve", "circle", "--m", "1", "--u0", "1", "--u1", "1"}).code, 2);
  EXPECT_EQ(twizzle({"mesh", "--curve", "circle", "--m", "1", "--nu", "1"}).code, 2);
  EXPECT_EQ(twizzle({"mesh", "--curve", "circle", "--m", "1", "--v0", "2", "--v1", "1"}).code, 2);
}

TEST_F(Cli, TreadmillCircleAndReconstruct) {
  ASSERT_EQ(twizzle({"solve", "--space", "r3", "--H", "0.5", "--M", "-2", "--m", "1", "-o", path("circ.csv")}).code, 0);
  ASSERT_EQ(twizzle({"treadmill", "--in", path("circ.csv"), "--ell", "1", "-o", path("p.csv")}).code, 0);
  std::ifstream pf(path("p.csv"));
  const auto p = io::read_path(pf);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_NEAR(p.x[i], 0.0, 1e-12);
    EXPECT_NEAR(p.y[i], -2.0, 1e-12);
  }
  const auto r = twizzle({"treadmill", "--reconstruct", "--in", path("p.csv"), "-o", path("back.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream bf(path("back.csv"));
  const auto c = io::read_curve(bf);
  for (double u : {0.1, 1.0, 3.0}) EXPECT_NEAR(std::abs(c(u).pos), 2.0, 1e-12);
}

TEST_F(Cli, TreadmillEllOutsideUnitIntervalWarns) {
  const auto r = twizzle({"treadmill", "--curve", "circle", "--ell", "1.5", "--samples", "10"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_EQ(r.out.rfind("t,x,y", 0), 0u);
}

TEST_F(Cli, TreadmillReconstructSplitsIntoArcFiles) {
  ASSERT_EQ(twizzle({"treadmill", "--curve", "perturbed", "--samples", "2001", "-o", path("pp.csv")}).code, 0);
  const auto r = twizzle({"treadmill", "--reconstruct", "--in", path("pp.csv"), "-o", path("arc.csv")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("arc.csv")));
  EXPECT_TRUE(fs::exists(path("arc.arc1.csv")));
  EXPECT_EQ(twizzle({"treadmill", "--reconstruct", "--bridge", "--in", path("pp.csv"), "-o", path("whole.csv")}).code, 0);
}

TEST_F(Cli, FluxAndEquivTables) {
  const auto f = twizzle({"flux", "--curve", "circle", "--m", "1", "--samples", "5"});
  ASSERT_EQ(f.code, 0) << f.err;
  EXPECT_EQ(f.out.rfind("u,conormal,shaving,omega,closed_form,abs_diff", 0), 0u);
  const auto e = twizzle({"equiv", "--curve", "circle", "--m", "1", "--samples", "5"});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(e.out.rfind("u,C,M,C_plus_pi_M", 0), 0u);
  EXPECT_EQ(twizzle({"equiv", "--space", "s3", "--curve", "torus", "--m", "1"}).code, 2);
}

TEST_F(Cli, ConfigFileWithFlagPrecedence) {
  write("run.cfg", "# defaults\nspace = r3\nm = 1\nH = 3\ncurve = circle\nsamples = 12\n");
  const auto r = twizzle({"check", "--config", path("run.cfg"), "--H", "1"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("H=1 "), std::string::npos);
  EXPECT_NE(r.out.find("max_C_plus_piM="), std::string::npos);
  const auto plain = twizzle({"check", "--config", path("run.cfg")});
  EXPECT_NE(plain.out.find("H=3 "), std::string::npos) << plain.out;
  const auto flag_curve = twizzle({"check", "--config", path("run.cfg"), "--curve", "perturbed", "--H", "1"});
  EXPECT_EQ(flag_curve.code, 1);
  write("bad.cfg", "nonsense = 4\n");
  EXPECT_EQ(twizzle({"check", "--config", path("bad.cfg"), "--curve", "circle", "--m", "1"}).code, 2);
  write("junk.cfg", "just words\n");
  EXPECT_EQ(twizzle({"check", "--config", path("junk.cfg"), "--curve", "circle", "--m", "1"}).code, 2);
}

TEST_F(Cli, Deterministic) {
  const auto a = twizzle({"solve", "--space", "r3", "--H", "-1", "--M", "0.5", "--m", "1", "--length", "2"});
  const auto b = twizzle({"solve", "--space", "r3", "--H", "-1", "--M", "0.5", "--m", "1", "--length", "2"});
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.err, b.err);
}
