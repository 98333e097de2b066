#include <doctest.h>

#include <random>

#include "gmop/analysis.hpp"
#include "gmop/linalg.hpp"
#include "gmop/network.hpp"
#include "gmop/rng.hpp"
#include "oracles.hpp"

using namespace gmop;

TEST_SUITE("linalg") {

TEST_CASE("2x2 against the characteristic polynomial") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::MatrixXd m(2, 2);
    m << u(rng), u(rng), u(rng), u(rng);
    const double ref = oracle::spectral_radius_2x2(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
    CHECK(spectral_radius(m) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("3x3 against the characteristic polynomial") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    double raw[9];
    Eigen::MatrixXd m(3, 3);
    for (int i = 0; i < 9; ++i) {
      raw[i] = u(rng);
      m(i / 3, i % 3) = raw[i];
    }
    CHECK(spectral_radius(m) == doctest::Approx(oracle::spectral_radius_3x3(raw)).epsilon(1e-8));
  }
}

TEST_CASE("hand values") {
  Eigen::MatrixXd rot(2, 2);
  rot << 0.0, -1.0, 1.0, 0.0;
  CHECK(spectral_radius(rot) == doctest::Approx(1.0));
  Eigen::MatrixXd diag = Eigen::Vector3d(0.5, -3.0, 2.0).asDiagonal();
  CHECK(spectral_radius(diag) == doctest::Approx(3.0));
  CHECK(spectral_radius(Eigen::MatrixXd(0, 0)) == 0.0);
  CHECK_THROWS(spectral_radius(Eigen::MatrixXd::Ones(2, 3)));
}

TEST_CASE("subspace iteration agrees with the dense solver on system matrices") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng = substream(seed, "network");
    Rng wr = substream(seed, "weights");
    const SocialGraph g = assign_random_weights(generate_watts_strogatz(120, 4, 0.2, rng), wr);
    const SystemMatrices m = build_system_matrices(g, {0.6, sigma_fixed_point(0.1, 0.1), 0.1});
    const double dense = spectral_radius(m.A, SpectralMethod::Dense);
    const double sub = spectral_radius(m.A, SpectralMethod::Subspace);
    CHECK(sub == doctest::Approx(dense).epsilon(1e-8));
  }
}

TEST_CASE("default method switches solver above the dense limit") {
  Rng rng = substream(8, "network");
  Rng wr = substream(8, "weights");
  const SocialGraph g = assign_random_weights(generate_watts_strogatz(600, 4, 0.1, rng), wr);
  const SystemMatrices m = build_system_matrices(g, {0.6, sigma_fixed_point(0.1, 0.1), 0.1});
  CHECK(spectral_radius(m.A) == doctest::Approx(spectral_radius(m.A, SpectralMethod::Dense)).epsilon(1e-8));
}

}
