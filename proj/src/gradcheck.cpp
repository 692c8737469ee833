#include "oclu/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

namespace oclu::ad {

namespace {

double evaluate(const GraphFn& graph, const std::vector<Tensor<double>>& inputs,
                const Tensor<double>* weights, Tape<double>& tape, Var& out,
                std::vector<Var>& leaves) {
  leaves.clear();
  for (const auto& in : inputs) leaves.push_back(tape.variable(in));
  out = graph(tape, leaves);
  if (weights) out = weighted_sum(tape, out, *weights);
  return tape.value(out)[0];
}

}  // namespace

GradCheckReport finite_diff_check(const GraphFn& graph, std::vector<Tensor<double>> inputs,
                                  double h, double tol) {
  GradCheckReport report;
  report.tolerance = tol;

  // Probe once to learn the output size.
  std::optional<Tensor<double>> weights;
  {
    Tape<double> probe;
    std::vector<Var> leaves;
    for (const auto& in : inputs) leaves.push_back(probe.variable(in));
    const auto& y = probe.value(graph(probe, leaves));
    if (y.size() != 1) {
      std::mt19937_64 rng(0x6a09e667f3bcc908ULL);
      std::uniform_real_distribution<double> u(0.5, 1.5);
      Tensor<double> w(y.shape());
      for (auto& v : w.values()) v = u(rng);
      weights = std::move(w);
    }
  }
  const Tensor<double>* wp = weights ? &*weights : nullptr;

  Tape<double> tape;
  Var out;
  std::vector<Var> leaves;
  evaluate(graph, inputs, wp, tape, out, leaves);
  tape.backward(out);

  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto analytic = tape.grad(leaves[i]);
    double worst = 0.0;
    for (std::size_t j = 0; j < inputs[i].size(); ++j) {
      const double saved = inputs[i][j];
      inputs[i][j] = saved + h;
      Tape<double> tp;
      Var o;
      std::vector<Var> lv;
      const double fp = evaluate(graph, inputs, wp, tp, o, lv);
      inputs[i][j] = saved - h;
      Tape<double> tm;
      const double fm = evaluate(graph, inputs, wp, tm, o, lv);
      inputs[i][j] = saved;

      const double numeric = (fp - fm) / (2.0 * h);
      const double a = analytic[j];
      const double rel =
          std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, rel);
    }
    report.max_rel_error.push_back(worst);
    report.worst = std::max(report.worst, worst);
  }
  report.passed = report.worst < tol;
  return report;
}

}  // namespace oclu::ad
