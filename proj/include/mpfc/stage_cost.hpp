#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace mpfc {

/// Quadratic running cost l(y, u) = y'Qy + u'Ru with symmetric PSD Q, R.
class StageCost {
public:
  /// Validates symmetry (1e-12) and positive semidefiniteness
  /// (eigenvalues >= -1e-12); throws std::invalid_argument otherwise.
  StageCost(Eigen::MatrixXd Q, Eigen::MatrixXd R);

  double operator()(const Eigen::VectorXd& y, const Eigen::VectorXd& u) const {
    return y.dot(Q_ * y) + u.dot(R_ * u);
  }

  int dim() const { return static_cast<int>(Q_.rows()); }
  const Eigen::MatrixXd& Q() const { return Q_; }
  const Eigen::MatrixXd& R() const { return R_; }

  /// Positive definiteness of Q; the asymptotic-convergence guarantee
  /// needs it, containment and cost descent do not.
  bool q_positive_definite() const { return q_pd_; }

private:
  Eigen::MatrixXd Q_, R_;
  bool q_pd_;
};

inline double stage_cost(const Eigen::VectorXd& y, const Eigen::VectorXd& u, const StageCost& sc) {
  return sc(y, u);
}

} // namespace mpfc
