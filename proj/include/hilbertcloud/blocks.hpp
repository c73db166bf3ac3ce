#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hilbertcloud/error.hpp"
#include "hilbertcloud/rng.hpp"

namespace hcl::blocks {

/// Feature map flowing through the 1-D blocks: `points` rows (the sorted
/// point dimension) by `channels` columns, row-major.
struct Tensor {
    int points = 0, channels = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int n, int c, double fill = 0.0)
        : points(n), channels(c), data(static_cast<std::size_t>(n) * c, fill) {}

    double& at(int i, int c) { return data[static_cast<std::size_t>(i) * channels + c]; }
    double at(int i, int c) const { return data[static_cast<std::size_t>(i) * channels + c]; }
    bool same_shape(const Tensor& o) const {
        return points == o.points && channels == o.channels;
    }
    bool operator==(const Tensor&) const = default;
};

/// 1-D convolution, stride 1, zero "same" padding, odd kernel.
/// weights laid out [tap][in][out], bias per output channel. Gradient
/// buffers live next to the values and are filled by Tape::backward.
struct ConvSpec {
    int in_channels = 0, out_channels = 0, kernel = 1, dilation = 1;
    std::vector<double> weights, bias;
    std::vector<double> wgrad, bgrad;

    static ConvSpec make(int in, int out, int kernel, int dilation = 1);
    void zero_grad();
};

/// Fully connected layer, weights [in][out].
struct Dense {
    int in = 0, out = 0;
    std::vector<double> w, b;
    std::vector<double> wgrad, bgrad;

    static Dense make(int in, int out);
    void zero_grad();
};

/// Per-channel depthwise 1-D convolution: weights [tap][channel].
struct DepthwiseSpec {
    int channels = 0, kernel = 1, dilation = 1;
    std::vector<double> weights, bias;
    std::vector<double> wgrad, bgrad;

    static DepthwiseSpec make(int channels, int kernel, int dilation = 1);
    void zero_grad();
};

/// Depthwise filter followed by a pointwise (kernel-1) mixing conv.
struct SepConvSpec {
    DepthwiseSpec depthwise;
    ConvSpec pointwise;

    static SepConvSpec make(int in, int out, int kernel, int dilation = 1);
    void zero_grad();
};

/// Per-channel affine (scale, shift); the inference-form stand-in for batch
/// normalization.
struct ChannelAffine {
    int channels = 0;
    std::vector<double> scale, shift;
    std::vector<double> sgrad, hgrad;

    static ChannelAffine make(int channels);
    void zero_grad();
};

/// Channel attention: global mean pool -> FC(C -> C/r) -> ReLU ->
/// FC(C/r -> C) -> sigmoid -> per-channel rescaling of the input.
struct CaParams {
    Dense reduce, expand;

    static CaParams make(int channels, int reduction);
    void zero_grad();
};

/// Multi-scale feature aggregation: parallel conv branches with growing
/// kernels/dilations, concatenated and fused by a kernel-1 conv.
struct MfaParams {
    std::vector<ConvSpec> branches;
    ConvSpec fusion;

    static MfaParams make(int in, int branch_out, int out,
                          std::span<const int> kernels = std::span<const int>{},
                          std::span<const int> dilations = std::span<const int>{});
    void zero_grad();
};

/// Bilateral fusion of two streams: each stream is gated by the sigmoid of a
/// kernel-1 conv of the other, the gated sum goes through a kernel-1 fusion
/// conv. gate_a reads stream a (and gates b); gate_b reads b (and gates a).
struct BfaParams {
    ConvSpec gate_a, gate_b, fusion;

    static BfaParams make(int channels, int out);
    void zero_grad();
};

/// Aggregated block: heavy path through MFA, attentive rechecking (one
/// branch through CA, re-added to the other), then BFA with the light path.
struct AggParams {
    MfaParams mfa;
    CaParams ca;
    BfaParams bfa;

    static AggParams make(int in, int channels, int reduction = 2);
    void zero_grad();
};

/// Named handle on one learnable array, used by the gradient checker and the
/// JSON (de)serializer.
struct ParamView {
    std::string name;
    std::vector<int> shape;
    std::vector<double>* value = nullptr;
    std::vector<double>* grad = nullptr;
};

std::vector<ParamView> param_views(ConvSpec& s, const std::string& prefix);
std::vector<ParamView> param_views(Dense& s, const std::string& prefix);
std::vector<ParamView> param_views(DepthwiseSpec& s, const std::string& prefix);
std::vector<ParamView> param_views(SepConvSpec& s, const std::string& prefix);
std::vector<ParamView> param_views(ChannelAffine& s, const std::string& prefix);
std::vector<ParamView> param_views(CaParams& s, const std::string& prefix);
std::vector<ParamView> param_views(MfaParams& s, const std::string& prefix);
std::vector<ParamView> param_views(BfaParams& s, const std::string& prefix);
std::vector<ParamView> param_views(AggParams& s, const std::string& prefix);

/// JSON container for parameters: an array of {name, shape, values} objects
/// with row-major values. deserialize matches by name and checks shapes.
std::string serialize_params(std::span<const ParamView> views);
void deserialize_params(const std::string& json_text, std::span<ParamView> views);

/// Dynamic reverse-mode tape. Nodes are referenced by index; backward()
/// accumulates into node grads and the owning specs' grad buffers (callers
/// zero those first).
class Tape {
  public:
    int input(Tensor x);

    int conv1d(int x, ConvSpec& s);
    int depthwise_conv1d(int x, DepthwiseSpec& s);
    int dense(int x, Dense& d);
    int channel_affine(int x, ChannelAffine& a);
    int mean_points(int x);                         // (n,C) -> (1,C)
    int relu(int x);
    int sigmoid(int x);
    int add(int a, int b);
    int mul(int a, int b);
    int scale_channels(int x, int s);               // s is (1,C)
    int concat_channels(std::span<const int> xs);

    const Tensor& value(int id) const { return nodes_[id].val; }
    const Tensor& grad(int id) const { return nodes_[id].grad; }

    /// 0.5 * sum of squares of a node's entries; the readout used by the
    /// gradient checks.
    double sum_squares_half(int x) const;

    /// Reverse sweep from `root` seeded with dL/droot = seed.
    void backward(int root, const Tensor& seed);

    /// Reverse sweep for the sum-of-squares readout (seed = value(root)).
    void backward_sum_squares(int root);

  private:
    struct Node {
        Tensor val, grad;
        std::function<void(Tape&)> pull;  // empty for leaves
    };
    std::vector<Node> nodes_;
    int last_ = -1;  // node whose pull is running, set by backward()

    int push(Tensor val, std::function<void(Tape&)> pull);
    Tensor& grad_mut(int id) { return nodes_[id].grad; }
};

// Graph builders shared by the forward wrappers and the gradient checks.
int build_ca(Tape& t, int x, CaParams& p);
int build_mfa(Tape& t, int x, MfaParams& p);
int build_bfa(Tape& t, int a, int b, BfaParams& p);
int build_aggregated(Tape& t, int heavy, int light, AggParams& p);
int build_sep_conv(Tape& t, int x, SepConvSpec& p);
int build_res_unit(Tape& t, int x, ConvSpec& p);

// Forward-only entry points.
Tensor conv1d(const Tensor& x, const ConvSpec& s);
Tensor sep_conv1d(const Tensor& x, const SepConvSpec& s);
Tensor res_unit(const Tensor& x, const ConvSpec& s);
Tensor channel_attention(const Tensor& x, const CaParams& p);
Tensor mfa_forward(const Tensor& x, const MfaParams& p);
Tensor bfa_forward(const Tensor& a, const Tensor& b, const BfaParams& p);
Tensor aggregated_forward(const Tensor& heavy, const Tensor& light, const AggParams& p);

/// Central-difference check of d(sum_squares_half(output))/d(params) against
/// the tape gradient. `forward` rebuilds the graph on the given tape and
/// returns the output node. Reports the max elementwise relative error with
/// denominator max(|fd|, 1e-8).
double grad_check(const std::function<int(Tape&)>& forward, std::span<ParamView> params,
                  double step);

/// Fills every parameter array with uniform values in [-0.5, 0.5].
void randomize(std::span<ParamView> views, Rng& rng);

}  // namespace hcl::blocks
