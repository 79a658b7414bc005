#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "ovm/csv.hpp"
#include "ovm/error.hpp"

namespace {

namespace fs = std::filesystem;

fs::path scratch(const char* name) {
  const auto dir = fs::temp_directory_path() / "ovm_csv_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(Csv, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 186880.0, 1e-300, -2.5}) EXPECT_EQ(std::strtod(ovm::format_double(v).c_str(), nullptr), v);
  EXPECT_EQ(ovm::format_double(0.5), "0.5");
  EXPECT_EQ(ovm::format_double(0.1), "0.10000000000000001");
}

TEST(Csv, Lists) {
  EXPECT_EQ(ovm::join_list({3, 1, 2}), "3;1;2");
  EXPECT_EQ(ovm::join_list({}), "");
  EXPECT_EQ(ovm::parse_list("3;1;2"), (std::vector<std::size_t>{3, 1, 2}));
  EXPECT_TRUE(ovm::parse_list("").empty());
}

TEST(Csv, SplitJoin) {
  EXPECT_EQ(ovm::split("a,,b", ','), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(ovm::join({"a", "b"}, ','), "a,b");
}

TEST(Csv, ReadAndSchema) {
  const auto path = scratch("ok.csv");
  std::ofstream(path) << "x,y\n1,2\n3,4\n";
  const auto t = ovm::read_csv(path);
  EXPECT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.column("y"), 1u);
  EXPECT_NO_THROW(ovm::require_header(t, {"x", "y"}, "ok"));
  try {
    ovm::require_header(t, {"x", "y", "z"}, "ok");
    FAIL();
  } catch (const ovm::Error& e) {
    EXPECT_EQ(e.kind(), ovm::ErrorKind::SchemaMismatch);
  }
  try {
    t.column("z");
    FAIL();
  } catch (const ovm::Error& e) {
    EXPECT_EQ(e.kind(), ovm::ErrorKind::SchemaMismatch);
  }
}

TEST(Csv, RaggedAndMissing) {
  const auto path = scratch("ragged.csv");
  std::ofstream(path) << "x,y\n1\n";
  try {
    ovm::read_csv(path);
    FAIL();
  } catch (const ovm::Error& e) {
    EXPECT_EQ(e.kind(), ovm::ErrorKind::SchemaMismatch);
  }
  try {
    ovm::read_csv(scratch("absent.csv"));
    FAIL();
  } catch (const ovm::Error& e) {
    EXPECT_EQ(e.kind(), ovm::ErrorKind::IoError);
  }
}

}  // namespace
