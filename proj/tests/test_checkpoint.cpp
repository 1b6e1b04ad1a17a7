// Binary checkpoint round-trips and header validation.

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "support/oracles.hpp"
#include "tns/checkpoint.hpp"

namespace tns {
namespace {

using namespace oracle;

class CheckpointFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("tns_ckpt_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string file(const char* name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

TEST_F(CheckpointFiles, VectorFieldRoundTripIsExact) {
  const FrequencyLattice lat = make_lattice(2, 12, 0.25);
  std::mt19937_64 rng(99);
  SpectralVectorField u(lat, 0.625);
  for (int j = 0; j < 2; ++j) {
    const SpectralScalarField r = random_scalar(lat, rng);
    u.comp[j] = r.a;
  }

  const std::string path = file("u.tnsf");
  write_checkpoint(path, u);
  const Checkpoint cp = read_checkpoint(path);

  EXPECT_EQ(cp.lattice, lat);
  EXPECT_EQ(cp.time, 0.625);
  const SpectralVectorField v = cp.as_vector_field();
  EXPECT_EQ(v.time, 0.625);
  for (int j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < u.comp[j].size(); ++i) EXPECT_EQ(v.comp[j][i], u.comp[j][i]);
}

TEST_F(CheckpointFiles, ScalarAndThreeDimensionalRoundTrips) {
  const FrequencyLattice lat2 = make_lattice(2, 8, 0.5);
  std::mt19937_64 rng(7);
  SpectralScalarField w = random_scalar(lat2, rng);
  w.time = 1.0 / 3.0;
  write_checkpoint(file("w.tnsf"), w);
  const Checkpoint cw = read_checkpoint(file("w.tnsf"));
  EXPECT_EQ(cw.components.size(), 1u);
  const SpectralScalarField w2 = cw.as_scalar_field();
  EXPECT_EQ(w2.time, 1.0 / 3.0);
  for (std::size_t i = 0; i < w.a.size(); ++i) EXPECT_EQ(w2.a[i], w.a[i]);
  EXPECT_THROW(cw.as_vector_field(), std::runtime_error);

  const FrequencyLattice lat3 = make_lattice(3, 8, 1.0 / 8.0);
  SpectralVectorField u(lat3, 2.5);
  for (int j = 0; j < 3; ++j) u.comp[j] = random_scalar(lat3, rng).a;
  write_checkpoint(file("u3.tnsf"), u);
  const SpectralVectorField v = read_checkpoint(file("u3.tnsf")).as_vector_field();
  EXPECT_EQ(v.lattice, lat3);
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < u.comp[j].size(); ++i) EXPECT_EQ(v.comp[j][i], u.comp[j][i]);
}

TEST_F(CheckpointFiles, HeaderPreservesLatticeSpacingExactly) {
  const double h = 0.1;  // not a power of two: exercises exact f64 persistence
  const FrequencyLattice lat = make_lattice(2, 8, h);
  write_checkpoint(file("h.tnsf"), SpectralVectorField(lat, 0.3));
  EXPECT_EQ(read_checkpoint(file("h.tnsf")).lattice.h, h);
}

TEST_F(CheckpointFiles, RejectsMissingCorruptAndTruncatedFiles) {
  EXPECT_THROW(read_checkpoint(file("absent.tnsf")), std::runtime_error);

  {
    std::ofstream os(file("bad_magic.tnsf"), std::ios::binary);
    os << "NOPE" << std::string(60, '\0');
  }
  try {
    read_checkpoint(file("bad_magic.tnsf"));
    FAIL() << "expected bad-magic error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("magic"), std::string::npos);
  }

  const FrequencyLattice lat = make_lattice(2, 8, 0.5);
  write_checkpoint(file("good.tnsf"), SpectralVectorField(lat));
  const auto whole = std::filesystem::file_size(file("good.tnsf"));
  {
    std::ifstream is(file("good.tnsf"), std::ios::binary);
    std::string head(static_cast<std::size_t>(whole) / 2, '\0');
    is.read(head.data(), static_cast<std::streamsize>(head.size()));
    std::ofstream os(file("truncated.tnsf"), std::ios::binary);
    os.write(head.data(), static_cast<std::streamsize>(head.size()));
  }
  EXPECT_THROW(read_checkpoint(file("truncated.tnsf")), std::runtime_error);

  {
    std::ifstream is(file("good.tnsf"), std::ios::binary);
    std::string all((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    all[4] = 2;  // bump version field
    std::ofstream os(file("vers.tnsf"), std::ios::binary);
    os.write(all.data(), static_cast<std::streamsize>(all.size()));
  }
  try {
    read_checkpoint(file("vers.tnsf"));
    FAIL() << "expected version error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }

  {
    std::ifstream is(file("good.tnsf"), std::ios::binary);
    std::string all((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    all.push_back('\0');  // trailing byte
    std::ofstream os(file("trail.tnsf"), std::ios::binary);
    os.write(all.data(), static_cast<std::streamsize>(all.size()));
  }
  try {
    read_checkpoint(file("trail.tnsf"));
    FAIL() << "expected trailing-bytes error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("trailing"), std::string::npos);
  }
}

TEST_F(CheckpointFiles, WriteIsDeterministic) {
  const FrequencyLattice lat = make_lattice(2, 10, 0.2);
  std::mt19937_64 rng(5);
  SpectralVectorField u(lat, 0.125);
  for (int j = 0; j < 2; ++j) u.comp[j] = random_scalar(lat, rng).a;
  write_checkpoint(file("a.tnsf"), u);
  write_checkpoint(file("b.tnsf"), u);

  std::ifstream a(file("a.tnsf"), std::ios::binary), b(file("b.tnsf"), std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  EXPECT_EQ(sa, sb);
  // header: magic(4) version(4) dim(4) N(4) h(8) time(8) ncomp(4) = 36 bytes
  EXPECT_EQ(sa.size(), 36u + 2u * lat.point_count() * 16u);
}

}  // namespace
}  // namespace tns
