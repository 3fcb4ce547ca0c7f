#ifndef WBZ_TESTS_SUPPORT_TEST_UTIL_HPP
#define WBZ_TESTS_SUPPORT_TEST_UTIL_HPP

#include <filesystem>
#include <string>

#include "wbz/oracle.hpp"
#include "wbz/rng.hpp"

namespace wbz::test {

// G0 of the worked family: D = [1, 0], g = [0, e^{-t}].
inline WienerPlusFunction g0(const TimeGrid& grid) { return worked_family(1.0, 1.0, grid).g; }

// Scalar kernel e^{-t} as an exponential sum.
inline CausalKernel exp_kernel(const TimeGrid& grid, double rate = 1.0, double amp = 1.0) {
  Mat c(1, 1);
  c << amp;
  return CausalKernel::from_exp_sum(grid, {{c, cx(rate, 0.0)}});
}

// Random exponential-sum instance that certifies comfortably: D with singular
// values in [1, 1.5] and a kernel small enough that the symbol stays away
// from singular.
inline WienerPlusFunction random_certifiable(int m, int p, const TimeGrid& grid, Rng& rng,
                                             int max_terms = 2) {
  Mat d = rng.cgaussian_matrix(m, p);
  Eigen::JacobiSVD<Mat> svd(d, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sv(m);
  for (int i = 0; i < m; ++i) sv(i) = 1.0 + 0.5 * i / std::max(1, m - 1);
  d = svd.matrixU() * sv.asDiagonal() * svd.matrixV().adjoint();

  int nterms = 1 + static_cast<int>(rng.uniform() * max_terms) % max_terms;
  std::vector<ExpTerm> terms;
  double budget = 0.35;
  for (int k = 0; k < nterms; ++k) {
    Mat c = rng.cgaussian_matrix(m, p);
    cx pole(rng.uniform(1.0, 2.5), rng.uniform(-1.5, 1.5));
    c *= (budget / nterms) * pole.real() / std::max(c.norm(), 1e-12);
    terms.push_back({c, pole});
  }
  return WienerPlusFunction(d, CausalKernel::from_exp_sum(grid, terms));
}

// Rank-deficient D (not surjective) with a small kernel; never certifiable.
inline WienerPlusFunction random_uncertifiable(int m, int p, const TimeGrid& grid, Rng& rng) {
  Mat d = rng.cgaussian_matrix(m, p);
  Eigen::JacobiSVD<Mat> svd(d, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sv = Eigen::VectorXd::Ones(m);
  sv(m - 1) = 0.0;  // kill the last direction
  d = svd.matrixU() * sv.asDiagonal() * svd.matrixV().adjoint();
  Mat c = rng.cgaussian_matrix(m, p);
  c *= 0.05 / std::max(c.norm(), 1e-12);
  return WienerPlusFunction(d, CausalKernel::from_exp_sum(grid, {{c, cx(1.5, 0.3)}}));
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    path_ = std::filesystem::temp_directory_path() / ("wbz_test_" + name);
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string str() const { return path_.string(); }
  std::filesystem::path path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace wbz::test

#endif
