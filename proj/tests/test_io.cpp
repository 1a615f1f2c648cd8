#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace locindep;
using namespace testing_support;

namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST(Io, RoundTripIsExact) {
  TempDir dir("locindep_io_roundtrip");
  for (int which : {1, 2, 3}) {
    const auto paths = simulate(builtin_example(which), 0.01, 7, 100 + which);
    io::write_path_dir(dir.path(), paths);
    const auto back = io::read_path_dir(dir.path());
    EXPECT_TRUE(back == paths) << which;
    EXPECT_EQ(back.seed(), paths.seed());
  }
}

TEST(Io, FormatDoubleRoundTrips) {
  ExprGen gen(5, 1, 0);
  for (double v : gen.vec(1000, -1e6, 1e6)) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-2.0), "-2");
}

TEST(Io, PathsWithoutEventsOrMeta) {
  TempDir dir("locindep_io_minimal");
  write(dir.path() / "paths.csv", "path,t,x1\n0,0,1\n0,0.5,2\n0,1,3\n1,0,0\n1,0.5,0\n1,1,0\n");
  const auto paths = io::read_path_dir(dir.path());
  EXPECT_EQ(paths.n_paths(), 2u);
  EXPECT_EQ(paths.steps(), 2u);
  EXPECT_EQ(paths.value(0, 2, 0), 3.0);
  EXPECT_TRUE(paths.events().empty());
}

TEST(Io, MalformedFilesAreRejected) {
  TempDir dir("locindep_io_bad");
  EXPECT_THROW(io::read_path_dir(dir.path()), SpecError);

  const std::vector<std::string> bad_paths = {
      "",
      "time,t,x1\n0,0,1\n0,1,1\n",
      "path,t,x2\n0,0,1\n0,1,1\n",
      "path,t,x1\n0,0,1\n0,1\n",
      "path,t,x1\n0,0,abc\n0,1,1\n",
      "path,t,x1\n0,0,1\n",
      "path,t,x1\n0,0,1\n0,1,1\n2,0,1\n2,1,1\n",
      "path,t,x1\n0,0,1\n0,1,1\n1,0,1\n",
      "path,t,x1\n0,0,1\n0,0.2,1\n0,1,1\n",
  };
  for (const auto& text : bad_paths) {
    write(dir.path() / "paths.csv", text);
    EXPECT_THROW(io::read_path_dir(dir.path()), SpecError) << text;
  }

  write(dir.path() / "paths.csv", "path,t,x1\n0,0,0\n0,1,1\n");
  for (const auto& events : {"p,c,t,s\n", "path,component,t,size\n0,2,1,1\n",
                             "path,component,t,size\n0,1,1\n", "path,component,t,size\n5,1,1,1\n"}) {
    write(dir.path() / "events.csv", events);
    EXPECT_THROW(io::read_path_dir(dir.path()), SpecError) << events;
  }
  std::filesystem::remove(dir.path() / "events.csv");
  write(dir.path() / "meta.json", "{");
  EXPECT_THROW(io::read_path_dir(dir.path()), SpecError);
}

TEST(Io, AtomicWriteLeavesNoTemporary) {
  TempDir dir("locindep_io_atomic");
  io::write_file_atomic(dir.path() / "a.txt", "first");
  io::write_file_atomic(dir.path() / "a.txt", "second");
  std::ifstream in(dir.path() / "a.txt");
  std::string text((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(text, "second");
  EXPECT_FALSE(std::filesystem::exists(dir.path() / "a.txt.tmp"));
  EXPECT_THROW(io::write_file_atomic(dir.path() / "missing" / "b.txt", "x"), SpecError);
}

TEST(Io, TripletAndLoglikCsv) {
  const auto spec = make_spec({counting("2")}, 1.0);
  const auto paths = simulate(spec, 0.5, 1, 3);
  std::ostringstream t, l;
  io::write_triplet_csv(t, paths, evaluate_triplet(spec, paths, 0));
  io::write_loglik_csv(l, paths, loglik(spec, paths, 0));
  EXPECT_EQ(t.str().substr(0, t.str().find('\n')), "path,t,B,C,nu");
  EXPECT_NE(t.str().find("0,1,0,0,2\n"), std::string::npos) << t.str();
  EXPECT_EQ(l.str().substr(0, 20), "path,t,logZ\n0,0,0\n0,");
}
