#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace navth {

/// Layer sizes of the recurrent actor-critic network.
struct NetShape {
  int input_dim = 0;
  int targets = 1;
  int embed_dim = 64;
  int dense_dim = 128;
  int hidden_dim = 128;
  int actions = 4;

  void validate() const;
  friend bool operator==(const NetShape&, const NetShape&) = default;
};

/// Named slice of the flat parameter vector (row-major rows x cols).
struct TensorView {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::size_t offset = 0;
  std::size_t size() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
};

/// Activations of one forward step, enough to backpropagate it.
struct StepCache {
  std::vector<double> x;
  std::vector<int> nonzero;  // indices of nonzero inputs
  int target = 0;
  std::vector<double> h_prev;
  std::vector<double> a1;
  std::vector<double> u;
  std::vector<double> z, r, n, gh_n;
  std::vector<double> h;
  std::vector<double> log_probs;
  double value = 0.0;
};

/// Dense ReLU layer over the features, concatenated with a learned target
/// embedding, feeding a GRU cell with softmax policy and scalar value heads.
class Network {
 public:
  Network() = default;
  Network(const NetShape& shape, std::uint64_t seed);

  const NetShape& shape() const { return shape_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t size() const { return params_.size(); }
  const std::vector<TensorView>& tensors() const { return tensors_; }
  const TensorView& tensor(const std::string& name) const;

  /// One recurrent step. Fills `cache`; cache.h is the next hidden state.
  void forward(const std::vector<double>& x, int target, const std::vector<double>& h_prev,
               StepCache& cache) const;

 private:
  friend struct NetworkBackprop;
  void layout();

  NetShape shape_;
  std::vector<double> params_;
  std::vector<TensorView> tensors_;
  std::size_t w1_ = 0, b1_ = 0, emb_ = 0, wx_ = 0, uh_ = 0, bg_ = 0, wp_ = 0, bp_ = 0, wv_ = 0, bv_ = 0, sp_ = 0, sv_ = 0;
};

struct LossWeights {
  double value = 0.5;
  double entropy = 0.01;
};

/// Loss of one rollout segment given its forward caches:
///   sum_t -log pi(a_t) A_t + value * 0.5 (R_t - V_t)^2 - entropy * H(pi_t)
/// with advantages held constant. Accumulates d loss / d params into `grad`
/// (sized like params) and, when given, d loss / d inputs per step.
double segment_backward(const Network& net, const std::vector<StepCache>& caches,
                        const std::vector<int>& actions, const std::vector<double>& returns,
                        const std::vector<double>& advantages, const LossWeights& w,
                        std::vector<double>& grad,
                        std::vector<std::vector<double>>* input_grad = nullptr);

/// A frozen batch for offline loss evaluation.
struct Segment {
  std::vector<std::vector<double>> inputs;
  std::vector<int> targets;
  std::vector<int> actions;
  std::vector<double> returns;
  std::vector<double> advantages;
  std::vector<double> h0;
};

/// Runs the forward pass over a segment and returns its loss; gradients as
/// in segment_backward when `grad` is non-null.
double segment_loss(const Network& net, const Segment& seg, const LossWeights& w,
                    std::vector<double>* grad = nullptr,
                    std::vector<std::vector<double>>* input_grad = nullptr);

/// R_t = r_t + gamma * R_{t+1}, seeded with R_T = bootstrap.
std::vector<double> discounted_returns(const std::vector<double>& rewards, double bootstrap,
                                       double gamma);

class Adam {
 public:
  explicit Adam(double lr = 1e-4, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {}
  void step(std::vector<double>& params, const std::vector<double>& grad);
  long steps() const { return t_; }

 private:
  double lr_, b1_, b2_, eps_;
  std::vector<double> m_, v_;
  long t_ = 0;
};

/// Rescales `grad` in place so its L2 norm is at most `max_norm`; returns the
/// norm before clipping.
double clip_gradient(std::vector<double>& grad, double max_norm);

}  // namespace navth
