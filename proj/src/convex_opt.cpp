#include "cgcn/convex_opt.hpp"

namespace cgcn {

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kProjectedGd ? "projected-gd" : "projected-adam";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
  if (name == "gd" || name == "projected-gd") return OptimizerKind::kProjectedGd;
  if (name == "adam" || name == "projected-adam") return OptimizerKind::kProjectedAdam;
  throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

OptimizerState::OptimizerState(const OptimizerSettings& s, Eigen::Index rows, Eigen::Index cols)
    : settings(s),
      first_moment(Eigen::MatrixXd::Zero(rows, cols)),
      second_moment(Eigen::MatrixXd::Zero(rows, cols)) {
  if (!(s.step_size > 0.0)) throw std::invalid_argument("OptimizerState: step size must be positive");
}

Eigen::MatrixXd step(OptimizerState& state, const Eigen::MatrixXd& a, const Eigen::MatrixXd& grad) {
  if (a.rows() != grad.rows() || a.cols() != grad.cols()) {
    throw std::invalid_argument("step: parameter is " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " but gradient is " +
                                std::to_string(grad.rows()) + "x" + std::to_string(grad.cols()));
  }
  const OptimizerSettings& s = state.settings;
  ++state.round;
  if (s.kind == OptimizerKind::kProjectedGd) return a - s.step_size * grad;

  if (state.first_moment.rows() != a.rows() || state.first_moment.cols() != a.cols()) {
    state.first_moment = Eigen::MatrixXd::Zero(a.rows(), a.cols());
    state.second_moment = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  }
  state.first_moment = s.beta1 * state.first_moment + (1.0 - s.beta1) * grad;
  state.second_moment = s.beta2 * state.second_moment + (1.0 - s.beta2) * grad.cwiseAbs2();
  const double t = static_cast<double>(state.round);
  const double c1 = 1.0 - std::pow(s.beta1, t);
  const double c2 = 1.0 - std::pow(s.beta2, t);
  const Eigen::ArrayXXd m_hat = state.first_moment.array() / c1;
  const Eigen::ArrayXXd v_hat = state.second_moment.array() / c2;
  return a.array() - s.step_size * m_hat / (v_hat.sqrt() + s.epsilon);
}

Eigen::MatrixXd step(OptimizerState& state, const Eigen::MatrixXd& a, const Eigen::MatrixXd& grad,
                     const NuclearBall& ball) {
  return project_nuclear(step(state, a, grad), ball);
}

double PlateauSchedule::observe(double objective, double step_size) {
  if (objective < best_) {
    best_ = objective;
    stale_ = 0;
    return step_size;
  }
  if (++stale_ >= patience_) {
    stale_ = 0;
    return std::max(step_size * factor_, min_step_);
  }
  return step_size;
}

}  // namespace cgcn
