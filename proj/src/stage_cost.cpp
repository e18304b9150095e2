#include "mpfc/stage_cost.hpp"

#include <Eigen/Eigenvalues>

#include <string>

namespace mpfc {

namespace {

void check_psd(const Eigen::MatrixXd& M, const char* name, std::string& issues, bool* pd = nullptr) {
  if (M.rows() != M.cols()) {
    issues += std::string(name) + " is not square; ";
    return;
  }
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    issues += std::string(name) + " is not symmetric within 1e-12; ";
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  double lambda_min = es.eigenvalues().minCoeff();
  if (lambda_min < -1e-12)
    issues += std::string(name) + " has a negative eigenvalue (" + std::to_string(lambda_min) + "); ";
  if (pd) *pd = lambda_min > 1e-12;
}

} // namespace

StageCost::StageCost(Eigen::MatrixXd Q, Eigen::MatrixXd R)
    : Q_(std::move(Q)), R_(std::move(R)), q_pd_(false) {
  std::string issues;
  check_psd(Q_, "Q", issues, &q_pd_);
  check_psd(R_, "R", issues);
  if (Q_.rows() != R_.rows()) issues += "Q and R dimensions differ; ";
  if (!issues.empty()) throw std::invalid_argument("invalid stage cost: " + issues);
}

} // namespace mpfc
