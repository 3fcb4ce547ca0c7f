#ifndef WBZ_OPERATOR_HPP
#define WBZ_OPERATOR_HPP

#include <functional>
#include <memory>
#include <string>

#include "wbz/wiener.hpp"

namespace wbz {

enum class OperatorKind { WienerHopf, Hankel, Composite };

// Above this block dimension, dense materialization is refused and solvers
// fall back to matrix-free application.
inline constexpr Eigen::Index kDenseLimit = 4096;

// Finite section of a Wiener-Hopf or Hankel operator on [0, T]. The matrix is
// kept in the sqrt-weighted representation v_i = sqrt(w_i) f(t_i), so the
// Euclidean adjoint of the block matrix is the discretization of the adjoint
// symbol and Euclidean norms approximate L^2 norms. Wiener-Hopf kernel values
// at t = 0 enter jump-averaged, which reproduces the row-wise composite
// trapezoid rule.
class DiscretizedOperator {
 public:
  DiscretizedOperator() = default;

  static DiscretizedOperator wiener_hopf(Mat constant, std::vector<Mat> table, const TimeGrid& grid,
                                         std::string provenance, Mat zero_pos = Mat(), Mat zero_neg = Mat());
  static DiscretizedOperator hankel(std::vector<Mat> table, const TimeGrid& grid, std::string provenance);
  static DiscretizedOperator composite(Mat dense, int block_rows, int block_cols, const TimeGrid& grid,
                                       std::string provenance);

  OperatorKind kind() const { return kind_; }
  int block_rows() const { return block_rows_; }
  int block_cols() const { return block_cols_; }
  // one-sided kernel values at t = 0 (Wiener-Hopf kinds only)
  const Mat& kernel_zero_pos() const { return pos_zero_; }
  const Mat& kernel_zero_neg() const { return neg_zero_; }
  const TimeGrid& grid() const { return grid_; }
  Eigen::Index rows() const { return static_cast<Eigen::Index>(block_rows_) * grid_.n; }
  Eigen::Index cols() const { return static_cast<Eigen::Index>(block_cols_) * grid_.n; }
  const std::string& provenance() const { return provenance_; }
  const Mat& constant() const { return constant_; }
  // kernel value at signed lag d*h (Wiener-Hopf) or at sum (i+j)*h (Hankel)
  const Mat& table_at(int index) const { return table_[index]; }

  Vec apply(const Vec& v) const;
  Vec apply_adjoint(const Vec& v) const;

  // Conjugate-transpose operator; for table-backed kinds this flips the kernel.
  DiscretizedOperator adjoint() const;

  bool dense_feasible() const { return rows() <= kDenseLimit && cols() <= kDenseLimit; }
  // Materializes (and caches) the dense block matrix.
  const Mat& dense() const;
  std::shared_ptr<const Mat> dense_ptr() const;

 private:
  OperatorKind kind_ = OperatorKind::WienerHopf;
  int block_rows_ = 0, block_cols_ = 0;
  TimeGrid grid_;
  Mat constant_;
  std::vector<Mat> table_;
  Mat pos_zero_, neg_zero_;
  std::string provenance_;
  mutable std::shared_ptr<Mat> dense_;
};

DiscretizedOperator build_wiener_hopf(const WienerPlusFunction& f, const TimeGrid& grid);
DiscretizedOperator build_wiener_hopf(const Mat& constant, const FullLineKernel& kernel,
                                      std::string provenance);
DiscretizedOperator build_adjoint(const DiscretizedOperator& op);
DiscretizedOperator build_hankel(const CausalKernel& g, const TimeGrid& grid);

// Wiener-Hopf operator of R(s) = G(s) G(s)^*, built from the full-line kernel
// r = D g^* + g D^* + g star g^*.
DiscretizedOperator build_TR(const WienerPlusFunction& g, const TimeGrid& grid);
FullLineKernel tr_kernel(const WienerPlusFunction& g);

// Generic linear operator handle used to compose finite sections.
struct LinOp {
  Eigen::Index rows = 0, cols = 0;
  std::function<Vec(const Vec&)> apply;
  std::function<Vec(const Vec&)> apply_adjoint;
  std::shared_ptr<const Mat> dense;  // set when a materialized form exists

  bool is_square() const { return rows == cols; }
};

LinOp as_linop(const DiscretizedOperator& op);
LinOp as_linop(Mat dense);
LinOp identity_linop(Eigen::Index n);
// a * a^H, materialized densely when a is small enough.
LinOp normal_linop(const DiscretizedOperator& a);
LinOp compose(const LinOp& a, const LinOp& b);       // a b
LinOp subtract(const LinOp& a, const LinOp& b);      // a - b

// Weighted-representation helpers: column `col` of a sampled matrix function
// packed as sqrt(w_i) f(t_i), and back.
Vec pack_weighted_column(const CausalKernel& k, int col, const TimeGrid& grid);
void unpack_weighted_column(const Vec& v, int block_rows, const TimeGrid& grid, int col,
                            std::vector<Mat>& out);

// Application with the row-wise exact trapezoid rule. The shared block matrix
// carries an O(h) defect at the first and last time rows (the price of having
// the conjugate transpose be the adjoint discretization); these calls add the
// known two-row correction.
Vec apply_rowexact(const DiscretizedOperator& op, const Vec& v);
Vec apply_rowexact_adjoint(const DiscretizedOperator& op, const Vec& v);

// Cached dense factorization for repeated Hermitian positive definite solves.
class SpdFactor {
 public:
  explicit SpdFactor(const Mat& hermitian);
  Vec solve(const Vec& rhs) const;
  Mat solve(const Mat& rhs) const;
  bool factorized() const { return factorized_; }
  bool positive_definite() const { return positive_; }
  double min_pivot() const { return min_pivot_; }

 private:
  Eigen::LDLT<Mat> ldlt_;
  bool factorized_ = false;
  bool positive_ = false;
  double min_pivot_ = 0.0;
};

struct SpdSolveConfig {
  enum class Method { Auto, DenseCholesky, ConjugateGradient };
  Method method = Method::Auto;
  double rel_tol = 1e-10;
  int max_iterations = 5000;
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;
};

// Solve T x = rhs for Hermitian positive definite T.
Vec spd_solve(const LinOp& t, const Vec& rhs, const SpdSolveConfig& cfg = {}, SolveStats* stats = nullptr);
Mat spd_solve(const LinOp& t, const Mat& rhs, const SpdSolveConfig& cfg = {}, SolveStats* stats = nullptr);
Vec spd_solve(const DiscretizedOperator& t, const Vec& rhs, const SpdSolveConfig& cfg = {},
              SolveStats* stats = nullptr);

// Solve (T_F T_F^*) x = rhs with deferred correction: the Hermitian finite
// section is the solver, the row-exact composition is the target system, and
// a fixed number of refinement passes removes the boundary-row defect.
inline constexpr int kNormalRefinementPasses = 3;

class NormalSolver {
 public:
  NormalSolver(const DiscretizedOperator& tf, const SpdSolveConfig& cfg = {});
  Vec solve_refined(const Vec& rhs, SolveStats* stats = nullptr) const;
  const DiscretizedOperator& op() const { return tf_; }
  const DiscretizedOperator& op_adjoint() const { return adj_; }

 private:
  Vec inner_solve(const Vec& rhs) const;
  DiscretizedOperator tf_, adj_;
  LinOp normal_;
  std::shared_ptr<SpdFactor> factor_;
  SpdSolveConfig cfg_;
};

Vec solve_normal_refined(const DiscretizedOperator& tf, const Vec& rhs,
                         const SpdSolveConfig& cfg = {}, SolveStats* stats = nullptr);

// Extremal eigenvalues of a Hermitian operator. Dense operators use a
// factorization-based shift-inverted iteration; matrix-free operators use
// reorthogonalized Lanczos.
double min_eigenvalue(const LinOp& t);
double min_eigenvalue(const DiscretizedOperator& t);
double max_eigenvalue(const LinOp& t);
// Both spectral edges from one Krylov sweep.
std::pair<double, double> hermitian_extremes(const LinOp& t);

class SpdFactor;
// Shift-inverted iteration reusing an existing factorization.
double min_eigenvalue_with_factor(const Mat& hermitized, const SpdFactor& factor);
double operator_norm(const LinOp& t);
double operator_norm(const DiscretizedOperator& t);

// Largest k singular values via deterministic subspace iteration.
std::vector<double> top_singular_values(const LinOp& t, int k, int iterations = 80);

struct DecompositionResidual {
  double frobenius = 0.0;
  double spectral = 0.0;
  double frobenius_rel = 0.0;
  double spectral_rel = 0.0;
};

// || T_R - (T_G T_G^* + H_G H_G^*) || on the common discretization.
DecompositionResidual decomposition_residual(const WienerPlusFunction& g, const TimeGrid& grid);

}  // namespace wbz

#endif
