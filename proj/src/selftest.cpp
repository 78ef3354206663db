#include "phyfid/selftest.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include "phyfid/diffops.hpp"
#include "phyfid/flow.hpp"
#include "phyfid/kernels.hpp"
#include "phyfid/metrics.hpp"
#include "phyfid/promptnet.hpp"
#include "phyfid/quaternion.hpp"
#include "phyfid/synth.hpp"

namespace phyfid {

namespace {

using Check = std::function<bool(std::string&)>;

double max_interior_abs_error(const ScalarField& f, double expected, int border) {
  double worst = 0.0;
  for (int y = border; y < f.height() - border; ++y) {
    for (int x = border; x < f.width() - border; ++x) {
      worst = std::max(worst, std::abs(f(x, y) - expected));
    }
  }
  return worst;
}

bool quaternion_identities(std::string& detail) {
  using namespace qnn;
  const Quaternion i{0, 1, 0, 0}, j{0, 0, 1, 0}, k{0, 0, 0, 1};
  if (!(hamilton_product(i, j) == k)) {
    detail = "i*j != k";
    return false;
  }
  std::mt19937_64 engine(11);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const Quaternion a{d(engine), d(engine), d(engine), d(engine)};
    const Quaternion b{d(engine), d(engine), d(engine), d(engine)};
    const Eigen::Matrix4d lhs = quaternion_matrix(hamilton_product(a, b));
    const Eigen::Matrix4d rhs = quaternion_matrix(a) * quaternion_matrix(b);
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  detail = "max homomorphism error " + std::to_string(worst);
  return worst < 1e-10;
}

bool rotation_operators(std::string& detail) {
  const synth::GridSpec grid{64, 64, true};
  const FlowField flow = synth::rigid_rotation_flow(grid, 0.5);
  const double e_w = max_interior_abs_error(vorticity(flow), 1.0, 1);
  const double e_q = max_interior_abs_error(q_criterion(flow), 0.25, 1);
  const double e_d = max_interior_abs_error(divergence(flow), 0.0, 1);
  std::ostringstream s;
  s << "vorticity err " << e_w << ", Q err " << e_q << ", divergence err " << e_d;
  detail = s.str();
  return e_w == 0.0 && e_q == 0.0 && e_d == 0.0;
}

bool taylor_green_stream(std::string& detail) {
  const synth::GridSpec grid{128, 128, false};
  const FlowField flow = synth::taylor_green_flow(grid, 1.0);
  const ScalarField psi = stream_function(flow);
  const ScalarField exact = synth::taylor_green_stream_function(grid, 1.0);
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    mean_a += psi.values()[i];
    mean_b += exact.values()[i];
  }
  mean_a /= psi.size();
  mean_b /= psi.size();
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    err = std::max(err, std::abs((psi.values()[i] - mean_a) - (exact.values()[i] - mean_b)));
    scale = std::max(scale, std::abs(exact.values()[i] - mean_b));
  }
  detail = "relative error " + std::to_string(err / scale);
  return err / scale < 2e-2;
}

bool metric_identity(std::string& detail) {
  const synth::GridSpec grid{48, 48, true};
  const FrameSequence s =
      synth::render_advected_sequence(grid, synth::rigid_rotation_flow(grid, 0.03), 4, 5);
  const MetricReport r = evaluate_all(s, s);
  std::ostringstream out;
  out << "rmse " << r.rmse << ", ssim " << r.ssim << ", sfe " << r.sfe << ", ve " << r.ve;
  detail = out.str();
  return r.rmse == 0.0 && std::abs(r.ssim - 1.0) < 1e-9 && r.sfe == 0.0 && r.se == 0.0 &&
         r.qce == 0.0 && r.ve == 0.0 && std::abs(r.gs - r.notes.gs_real) < 1e-9;
}

bool translation_recovery(std::string& detail) {
  const synth::GridSpec grid{128, 128, true};
  const FrameSequence s =
      synth::render_advected_sequence(grid, synth::uniform_flow(grid, 3.0, 1.0), 2, 2024);
  const FlowField flow = farneback_flow(s[0], s[1]);
  std::vector<double> us, vs;
  for (int y = 16; y < 112; ++y) {
    for (int x = 16; x < 112; ++x) {
      us.push_back(flow.u(x, y));
      vs.push_back(flow.v(x, y));
    }
  }
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  const double mu = median(us), mv = median(vs);
  detail = "median flow (" + std::to_string(mu) + ", " + std::to_string(mv) + ")";
  return std::abs(mu - 3.0) < 0.25 && std::abs(mv - 1.0) < 0.25;
}

bool lora_zero_b(std::string& detail) {
  using namespace qnn;
  std::mt19937_64 engine(3);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  auto random = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(engine);
    return m;
  };
  AttentionWeights w{LoraAdapter::wrap(random(8, 6), 4, 4.0, 1),
                     LoraAdapter::wrap(random(8, 5), 4, 4.0, 2), random(7, 5)};
  const Eigen::MatrixXd z = random(3, 6), y = random(4, 5);
  const AttentionResult adapted = lora_cross_attention(z, y, w);
  AttentionWeights base = w;
  base.w_q.a.setZero();
  base.w_k.a.setZero();
  const AttentionResult plain = lora_cross_attention(z, y, base);
  const double diff = (adapted.output - plain.output).cwiseAbs().maxCoeff();
  detail = "max difference " + std::to_string(diff);
  return diff <= 1e-12;
}

bool kernel_paths(std::string& detail) {
  std::mt19937_64 engine(9);
  std::uniform_real_distribution<double> d(-100.0, 100.0);
  std::vector<double> a(1027), b(1027);
  for (auto& x : a) x = d(engine);
  for (auto& x : b) x = d(engine);
  const auto& ref = kernels::scalar::table;
  const auto& act = kernels::active();
  detail = std::string("active path ") + std::string(kernels::to_string(act.isa));
  return ref.sum_sq_diff(a.data(), b.data(), a.size()) ==
             act.sum_sq_diff(a.data(), b.data(), a.size()) &&
         ref.dot(a.data(), b.data(), a.size()) == act.dot(a.data(), b.data(), a.size()) &&
         ref.sum(a.data(), a.size()) == act.sum(a.data(), a.size());
}

}  // namespace

std::vector<SelftestCase> run_selftest(std::ostream& out, bool color) {
  const std::vector<std::pair<std::string, Check>> checks = {
      {"kernel paths agree bit-for-bit", kernel_paths},
      {"quaternion basis and homomorphism", quaternion_identities},
      {"rigid rotation operators", rotation_operators},
      {"Taylor-Green stream function", taylor_green_stream},
      {"metric identity on rendered sequence", metric_identity},
      {"translation (3, 1) flow recovery", translation_recovery},
      {"LoRA zero-B attention equivalence", lora_zero_b},
  };
  std::vector<SelftestCase> results;
  for (const auto& [name, check] : checks) {
    SelftestCase c{name, false, {}};
    try {
      c.passed = check(c.detail);
    } catch (const std::exception& e) {
      c.detail = std::string("threw: ") + e.what();
    }
    const char* tag = c.passed ? (color ? "\033[32mPASS\033[0m" : "PASS")
                               : (color ? "\033[31mFAIL\033[0m" : "FAIL");
    out << tag << "  " << c.name << "  (" << c.detail << ")\n";
    results.push_back(std::move(c));
  }
  return results;
}

}  // namespace phyfid
