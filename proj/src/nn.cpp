#include "navth/nn.hpp"

#include <algorithm>
#include <cmath>

#include "navth/error.hpp"
#include "navth/random.hpp"

namespace navth {

void NetShape::validate() const {
  if (input_dim < 1 || targets < 1 || embed_dim < 1 || dense_dim < 1 || hidden_dim < 1 || actions < 2)
    throw PreconditionError("invalid_network", "network dimensions must be positive (actions >= 2)");
}

namespace {

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// y += M x for row-major M (rows x cols).
inline void gemv_add(const double* m, int rows, int cols, const double* x, double* y) {
  for (int i = 0; i < rows; ++i) {
    const double* row = m + static_cast<std::size_t>(i) * cols;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    int j = 0;
    for (; j + 4 <= cols; j += 4) {
      s0 += row[j] * x[j];
      s1 += row[j + 1] * x[j + 1];
      s2 += row[j + 2] * x[j + 2];
      s3 += row[j + 3] * x[j + 3];
    }
    for (; j < cols; ++j) s0 += row[j] * x[j];
    y[i] += (s0 + s1) + (s2 + s3);
  }
}

// y += M^T d.
inline void gemv_t_add(const double* m, int rows, int cols, const double* d, double* y) {
  for (int i = 0; i < rows; ++i) {
    const double di = d[i];
    if (di == 0.0) continue;
    const double* row = m + static_cast<std::size_t>(i) * cols;
    for (int j = 0; j < cols; ++j) y[j] += di * row[j];
  }
}

// G += d x^T.
inline void outer_add(double* g, int rows, int cols, const double* d, const double* x) {
  for (int i = 0; i < rows; ++i) {
    const double di = d[i];
    if (di == 0.0) continue;
    double* row = g + static_cast<std::size_t>(i) * cols;
    for (int j = 0; j < cols; ++j) row[j] += di * x[j];
  }
}

}  // namespace

Network::Network(const NetShape& shape, std::uint64_t seed) : shape_(shape) {
  shape_.validate();
  layout();
  Rng rng(seed);
  auto fill = [&](const std::string& name, double scale) {
    const TensorView& t = tensor(name);
    const double bound = scale * std::sqrt(6.0 / (t.rows + t.cols));
    for (std::size_t i = 0; i < t.size(); ++i) params_[t.offset + i] = rng.uniform(-bound, bound);
  };
  fill("dense.weight", 1.0);
  fill("embedding.weight", 1.0);
  fill("gru.input_weight", 1.0);
  fill("gru.hidden_weight", 1.0);
  fill("policy.weight", 0.01);
  fill("value.weight", 0.1);
}

void Network::layout() {
  const int d = shape_.input_dim, h1 = shape_.dense_dim, e = shape_.embed_dim, h = shape_.hidden_dim,
            a = shape_.actions, t = shape_.targets;
  const int in = h1 + e;
  tensors_.clear();
  std::size_t off = 0;
  auto add = [&](const std::string& name, int rows, int cols) {
    tensors_.push_back({name, rows, cols, off});
    const std::size_t at = off;
    off += static_cast<std::size_t>(rows) * cols;
    return at;
  };
  w1_ = add("dense.weight", h1, d);
  b1_ = add("dense.bias", h1, 1);
  emb_ = add("embedding.weight", t, e);
  wx_ = add("gru.input_weight", 3 * h, in);
  uh_ = add("gru.hidden_weight", 3 * h, h);
  bg_ = add("gru.bias", 3 * h, 1);
  wp_ = add("policy.weight", a, h);
  bp_ = add("policy.bias", a, 1);
  wv_ = add("value.weight", 1, h);
  bv_ = add("value.bias", 1, 1);
  sp_ = add("policy.skip", a, d);
  sv_ = add("value.skip", 1, d);
  params_.assign(off, 0.0);
}

const TensorView& Network::tensor(const std::string& name) const {
  for (const auto& t : tensors_)
    if (t.name == name) return t;
  throw PreconditionError("unknown_tensor", "no tensor named " + name);
}

void Network::forward(const std::vector<double>& x, int target, const std::vector<double>& h_prev,
                      StepCache& c) const {
  const int d = shape_.input_dim, h1 = shape_.dense_dim, e = shape_.embed_dim, h = shape_.hidden_dim,
            a = shape_.actions;
  const int in = h1 + e;
  if (static_cast<int>(x.size()) != d || static_cast<int>(h_prev.size()) != h)
    throw PreconditionError("shape_mismatch", "input or memory has the wrong dimension");
  if (target < 0 || target >= shape_.targets)
    throw PreconditionError("shape_mismatch", "target index out of range");
  const double* p = params_.data();

  c.x = x;
  c.nonzero.clear();
  for (int j = 0; j < d; ++j)
    if (x[static_cast<std::size_t>(j)] != 0.0) c.nonzero.push_back(j);
  c.target = target;
  c.h_prev = h_prev;

  c.a1.assign(p + b1_, p + b1_ + h1);
  for (int i = 0; i < h1; ++i) {
    const double* row = p + w1_ + static_cast<std::size_t>(i) * d;
    double s = 0.0;
    for (int j : c.nonzero) s += row[j] * x[static_cast<std::size_t>(j)];
    c.a1[static_cast<std::size_t>(i)] += s;
  }
  c.u.resize(static_cast<std::size_t>(in));
  for (int i = 0; i < h1; ++i) c.u[static_cast<std::size_t>(i)] = std::max(0.0, c.a1[static_cast<std::size_t>(i)]);
  std::copy(p + emb_ + static_cast<std::size_t>(target) * e, p + emb_ + static_cast<std::size_t>(target + 1) * e,
            c.u.begin() + h1);

  std::vector<double> gx(p + bg_, p + bg_ + 3 * h);
  gemv_add(p + wx_, 3 * h, in, c.u.data(), gx.data());
  std::vector<double> gh(static_cast<std::size_t>(3 * h), 0.0);
  gemv_add(p + uh_, 3 * h, h, h_prev.data(), gh.data());

  c.z.resize(static_cast<std::size_t>(h));
  c.r.resize(static_cast<std::size_t>(h));
  c.n.resize(static_cast<std::size_t>(h));
  c.gh_n.resize(static_cast<std::size_t>(h));
  c.h.resize(static_cast<std::size_t>(h));
  for (int i = 0; i < h; ++i) {
    const auto k = static_cast<std::size_t>(i);
    c.z[k] = sigmoid(gx[k] + gh[k]);
    c.r[k] = sigmoid(gx[k + h] + gh[k + h]);
    c.gh_n[k] = gh[k + 2 * h];
    c.n[k] = std::tanh(gx[k + 2 * h] + c.r[k] * c.gh_n[k]);
    c.h[k] = (1.0 - c.z[k]) * c.n[k] + c.z[k] * h_prev[k];
  }

  std::vector<double> logits(p + bp_, p + bp_ + a);
  gemv_add(p + wp_, a, h, c.h.data(), logits.data());
  for (int i = 0; i < a; ++i) {
    const double* row = p + sp_ + static_cast<std::size_t>(i) * d;
    for (int j : c.nonzero) logits[static_cast<std::size_t>(i)] += row[j] * x[static_cast<std::size_t>(j)];
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - mx);
  const double lse = mx + std::log(sum);
  c.log_probs.resize(static_cast<std::size_t>(a));
  for (int i = 0; i < a; ++i) c.log_probs[static_cast<std::size_t>(i)] = logits[static_cast<std::size_t>(i)] - lse;

  double v = p[bv_];
  for (int i = 0; i < h; ++i) v += p[wv_ + static_cast<std::size_t>(i)] * c.h[static_cast<std::size_t>(i)];
  for (int j : c.nonzero) v += p[sv_ + static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
  c.value = v;
}

struct NetworkBackprop {
  static double run(const Network& net, const std::vector<StepCache>& caches, const std::vector<int>& actions,
                    const std::vector<double>& returns, const std::vector<double>& advantages,
                    const LossWeights& w, std::vector<double>& grad,
                    std::vector<std::vector<double>>* input_grad) {
    const NetShape& s = net.shape_;
    const int d = s.input_dim, h1 = s.dense_dim, e = s.embed_dim, h = s.hidden_dim, a = s.actions;
    const int in = h1 + e;
    const std::size_t steps = caches.size();
    if (actions.size() != steps || returns.size() != steps || advantages.size() != steps)
      throw PreconditionError("shape_mismatch", "segment arrays differ in length");
    if (grad.size() != net.params_.size()) grad.assign(net.params_.size(), 0.0);
    if (input_grad) input_grad->assign(steps, std::vector<double>(static_cast<std::size_t>(d), 0.0));
    const double* p = net.params_.data();
    double* g = grad.data();

    double loss = 0.0;
    std::vector<double> dh(static_cast<std::size_t>(h), 0.0), dh_prev(static_cast<std::size_t>(h));
    std::vector<double> dlogits(static_cast<std::size_t>(a)), dgx(static_cast<std::size_t>(3 * h)),
        dgh(static_cast<std::size_t>(3 * h)), du(static_cast<std::size_t>(in)), da1(static_cast<std::size_t>(h1));

    for (std::size_t step = steps; step-- > 0;) {
      const StepCache& c = caches[step];
      const int act = actions[step];
      if (act < 0 || act >= a) throw PreconditionError("shape_mismatch", "action index out of range");
      const double adv = advantages[step];

      // Heads.
      double entropy = 0.0;
      for (int i = 0; i < a; ++i) entropy -= std::exp(c.log_probs[static_cast<std::size_t>(i)]) * c.log_probs[static_cast<std::size_t>(i)];
      const double verr = c.value - returns[step];
      loss += -c.log_probs[static_cast<std::size_t>(act)] * adv + w.value * 0.5 * verr * verr - w.entropy * entropy;
      for (int i = 0; i < a; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double pi = std::exp(c.log_probs[k]);
        dlogits[k] = adv * pi + w.entropy * pi * (c.log_probs[k] + entropy);
      }
      dlogits[static_cast<std::size_t>(act)] -= adv;
      const double dv = w.value * verr;

      outer_add(g + net.wp_, a, h, dlogits.data(), c.h.data());
      for (int i = 0; i < a; ++i) g[net.bp_ + static_cast<std::size_t>(i)] += dlogits[static_cast<std::size_t>(i)];
      for (int i = 0; i < h; ++i) g[net.wv_ + static_cast<std::size_t>(i)] += dv * c.h[static_cast<std::size_t>(i)];
      g[net.bv_] += dv;
      for (int i = 0; i < a; ++i) {
        const double di = dlogits[static_cast<std::size_t>(i)];
        double* row = g + net.sp_ + static_cast<std::size_t>(i) * d;
        for (int j : c.nonzero) row[j] += di * c.x[static_cast<std::size_t>(j)];
      }
      for (int j : c.nonzero) g[net.sv_ + static_cast<std::size_t>(j)] += dv * c.x[static_cast<std::size_t>(j)];
      if (input_grad) {
        auto& gx_in = (*input_grad)[step];
        gemv_t_add(p + net.sp_, a, d, dlogits.data(), gx_in.data());
        for (int j = 0; j < d; ++j) gx_in[static_cast<std::size_t>(j)] += dv * p[net.sv_ + static_cast<std::size_t>(j)];
      }
      gemv_t_add(p + net.wp_, a, h, dlogits.data(), dh.data());
      for (int i = 0; i < h; ++i) dh[static_cast<std::size_t>(i)] += dv * p[net.wv_ + static_cast<std::size_t>(i)];

      // GRU cell.
      for (int i = 0; i < h; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double dn = dh[k] * (1.0 - c.z[k]);
        const double dz = dh[k] * (c.h_prev[k] - c.n[k]);
        dh_prev[k] = dh[k] * c.z[k];
        const double dan = dn * (1.0 - c.n[k] * c.n[k]);
        const double dr = dan * c.gh_n[k];
        const double daz = dz * c.z[k] * (1.0 - c.z[k]);
        const double dar = dr * c.r[k] * (1.0 - c.r[k]);
        dgx[k] = daz;
        dgx[k + h] = dar;
        dgx[k + 2 * h] = dan;
        dgh[k] = daz;
        dgh[k + h] = dar;
        dgh[k + 2 * h] = dan * c.r[k];
      }
      outer_add(g + net.wx_, 3 * h, in, dgx.data(), c.u.data());
      for (int i = 0; i < 3 * h; ++i) g[net.bg_ + static_cast<std::size_t>(i)] += dgx[static_cast<std::size_t>(i)];
      outer_add(g + net.uh_, 3 * h, h, dgh.data(), c.h_prev.data());
      gemv_t_add(p + net.uh_, 3 * h, h, dgh.data(), dh_prev.data());
      std::fill(du.begin(), du.end(), 0.0);
      gemv_t_add(p + net.wx_, 3 * h, in, dgx.data(), du.data());

      // Embedding and dense layer.
      double* ge = g + net.emb_ + static_cast<std::size_t>(c.target) * e;
      for (int i = 0; i < e; ++i) ge[i] += du[static_cast<std::size_t>(h1 + i)];
      for (int i = 0; i < h1; ++i) {
        const auto k = static_cast<std::size_t>(i);
        da1[k] = c.a1[k] > 0.0 ? du[k] : 0.0;
      }
      for (int i = 0; i < h1; ++i) {
        const double di = da1[static_cast<std::size_t>(i)];
        if (di == 0.0) continue;
        double* row = g + net.w1_ + static_cast<std::size_t>(i) * d;
        for (int j : c.nonzero) row[j] += di * c.x[static_cast<std::size_t>(j)];
        g[net.b1_ + static_cast<std::size_t>(i)] += di;
      }
      if (input_grad) gemv_t_add(p + net.w1_, h1, d, da1.data(), (*input_grad)[step].data());

      dh.swap(dh_prev);
    }
    return loss;
  }
};

double segment_backward(const Network& net, const std::vector<StepCache>& caches, const std::vector<int>& actions,
                        const std::vector<double>& returns, const std::vector<double>& advantages,
                        const LossWeights& w, std::vector<double>& grad,
                        std::vector<std::vector<double>>* input_grad) {
  return NetworkBackprop::run(net, caches, actions, returns, advantages, w, grad, input_grad);
}

double segment_loss(const Network& net, const Segment& seg, const LossWeights& w, std::vector<double>* grad,
                    std::vector<std::vector<double>>* input_grad) {
  std::vector<StepCache> caches(seg.inputs.size());
  std::vector<double> hidden = seg.h0;
  for (std::size_t t = 0; t < seg.inputs.size(); ++t) {
    net.forward(seg.inputs[t], seg.targets[t], hidden, caches[t]);
    hidden = caches[t].h;
  }
  std::vector<double> scratch;
  std::vector<double>& g = grad ? *grad : scratch;
  if (grad) g.assign(net.size(), 0.0);
  if (!grad && !input_grad) {
    // Loss only; evaluate the same expression without touching gradients.
    double loss = 0.0;
    for (std::size_t t = 0; t < caches.size(); ++t) {
      const auto& c = caches[t];
      double entropy = 0.0;
      for (double lp : c.log_probs) entropy -= std::exp(lp) * lp;
      const double verr = c.value - seg.returns[t];
      loss += -c.log_probs[static_cast<std::size_t>(seg.actions[t])] * seg.advantages[t] +
              w.value * 0.5 * verr * verr - w.entropy * entropy;
    }
    return loss;
  }
  return segment_backward(net, caches, seg.actions, seg.returns, seg.advantages, w, g, input_grad);
}

std::vector<double> discounted_returns(const std::vector<double>& rewards, double bootstrap, double gamma) {
  std::vector<double> out(rewards.size());
  double running = bootstrap;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    running = rewards[i] + gamma * running;
    out[i] = running;
  }
  return out;
}

void Adam::step(std::vector<double>& params, const std::vector<double>& grad) {
  if (grad.size() != params.size()) throw PreconditionError("shape_mismatch", "gradient size differs from parameters");
  if (m_.size() != params.size()) {
    m_.assign(params.size(), 0.0);
    v_.assign(params.size(), 0.0);
  }
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = b1_ * m_[i] + (1.0 - b1_) * grad[i];
    v_[i] = b2_ * v_[i] + (1.0 - b2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

double clip_gradient(std::vector<double>& grad, double max_norm) {
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (double& g : grad) g *= s;
  }
  return norm;
}

}  // namespace navth
