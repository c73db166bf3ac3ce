#include "hilbertcloud/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <json.hpp>

namespace hcl::blocks {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw DomainError(msg);
}

int same_pad(int kernel, int dilation) { return (kernel - 1) * dilation / 2; }

}  // namespace

// ---------------------------------------------------------------------------
// parameter containers

ConvSpec ConvSpec::make(int in, int out, int kernel, int dilation) {
    require(in >= 1 && out >= 1, "conv: channel counts must be positive");
    require(kernel >= 1 && kernel % 2 == 1, "conv: kernel must be odd");
    require(dilation >= 1, "conv: dilation must be positive");
    ConvSpec s;
    s.in_channels = in;
    s.out_channels = out;
    s.kernel = kernel;
    s.dilation = dilation;
    s.weights.assign(static_cast<std::size_t>(kernel) * in * out, 0.0);
    s.bias.assign(out, 0.0);
    s.zero_grad();
    return s;
}

void ConvSpec::zero_grad() {
    wgrad.assign(weights.size(), 0.0);
    bgrad.assign(bias.size(), 0.0);
}

Dense Dense::make(int in, int out) {
    require(in >= 1 && out >= 1, "dense: sizes must be positive");
    Dense d;
    d.in = in;
    d.out = out;
    d.w.assign(static_cast<std::size_t>(in) * out, 0.0);
    d.b.assign(out, 0.0);
    d.zero_grad();
    return d;
}

void Dense::zero_grad() {
    wgrad.assign(w.size(), 0.0);
    bgrad.assign(b.size(), 0.0);
}

DepthwiseSpec DepthwiseSpec::make(int channels, int kernel, int dilation) {
    require(channels >= 1, "depthwise: channels must be positive");
    require(kernel >= 1 && kernel % 2 == 1, "depthwise: kernel must be odd");
    require(dilation >= 1, "depthwise: dilation must be positive");
    DepthwiseSpec s;
    s.channels = channels;
    s.kernel = kernel;
    s.dilation = dilation;
    s.weights.assign(static_cast<std::size_t>(kernel) * channels, 0.0);
    s.bias.assign(channels, 0.0);
    s.zero_grad();
    return s;
}

void DepthwiseSpec::zero_grad() {
    wgrad.assign(weights.size(), 0.0);
    bgrad.assign(bias.size(), 0.0);
}

SepConvSpec SepConvSpec::make(int in, int out, int kernel, int dilation) {
    SepConvSpec s;
    s.depthwise = DepthwiseSpec::make(in, kernel, dilation);
    s.pointwise = ConvSpec::make(in, out, 1, 1);
    return s;
}

void SepConvSpec::zero_grad() {
    depthwise.zero_grad();
    pointwise.zero_grad();
}

ChannelAffine ChannelAffine::make(int channels) {
    require(channels >= 1, "affine: channels must be positive");
    ChannelAffine a;
    a.channels = channels;
    a.scale.assign(channels, 1.0);
    a.shift.assign(channels, 0.0);
    a.zero_grad();
    return a;
}

void ChannelAffine::zero_grad() {
    sgrad.assign(scale.size(), 0.0);
    hgrad.assign(shift.size(), 0.0);
}

CaParams CaParams::make(int channels, int reduction) {
    require(channels >= 1 && reduction >= 1, "channel attention: bad sizes");
    const int mid = std::max(1, channels / reduction);
    CaParams p;
    p.reduce = Dense::make(channels, mid);
    p.expand = Dense::make(mid, channels);
    return p;
}

void CaParams::zero_grad() {
    reduce.zero_grad();
    expand.zero_grad();
}

MfaParams MfaParams::make(int in, int branch_out, int out, std::span<const int> kernels,
                          std::span<const int> dilations) {
    static constexpr int kDefaultKernels[] = {1, 3, 5};
    static constexpr int kDefaultDilations[] = {1, 2, 4};
    if (kernels.empty()) kernels = kDefaultKernels;
    if (dilations.empty()) dilations = kDefaultDilations;
    require(kernels.size() == dilations.size(), "mfa: kernels/dilations length mismatch");
    require(!kernels.empty(), "mfa: needs at least one branch");

    MfaParams p;
    for (std::size_t b = 0; b < kernels.size(); ++b)
        p.branches.push_back(ConvSpec::make(in, branch_out, kernels[b], dilations[b]));
    p.fusion = ConvSpec::make(branch_out * static_cast<int>(kernels.size()), out, 1, 1);
    return p;
}

void MfaParams::zero_grad() {
    for (auto& b : branches) b.zero_grad();
    fusion.zero_grad();
}

BfaParams BfaParams::make(int channels, int out) {
    BfaParams p;
    p.gate_a = ConvSpec::make(channels, channels, 1, 1);
    p.gate_b = ConvSpec::make(channels, channels, 1, 1);
    p.fusion = ConvSpec::make(channels, out, 1, 1);
    return p;
}

void BfaParams::zero_grad() {
    gate_a.zero_grad();
    gate_b.zero_grad();
    fusion.zero_grad();
}

AggParams AggParams::make(int in, int channels, int reduction) {
    AggParams p;
    p.mfa = MfaParams::make(in, channels, channels);
    p.ca = CaParams::make(channels, reduction);
    p.bfa = BfaParams::make(channels, channels);
    return p;
}

void AggParams::zero_grad() {
    mfa.zero_grad();
    ca.zero_grad();
    bfa.zero_grad();
}

// ---------------------------------------------------------------------------
// parameter views + JSON container

std::vector<ParamView> param_views(ConvSpec& s, const std::string& prefix) {
    return {
        {prefix + ".weights", {s.kernel, s.in_channels, s.out_channels}, &s.weights, &s.wgrad},
        {prefix + ".bias", {s.out_channels}, &s.bias, &s.bgrad},
    };
}

std::vector<ParamView> param_views(Dense& s, const std::string& prefix) {
    return {
        {prefix + ".w", {s.in, s.out}, &s.w, &s.wgrad},
        {prefix + ".b", {s.out}, &s.b, &s.bgrad},
    };
}

std::vector<ParamView> param_views(DepthwiseSpec& s, const std::string& prefix) {
    return {
        {prefix + ".weights", {s.kernel, s.channels}, &s.weights, &s.wgrad},
        {prefix + ".bias", {s.channels}, &s.bias, &s.bgrad},
    };
}

namespace {
void append(std::vector<ParamView>& into, std::vector<ParamView> more) {
    for (auto& v : more) into.push_back(std::move(v));
}
}  // namespace

std::vector<ParamView> param_views(SepConvSpec& s, const std::string& prefix) {
    std::vector<ParamView> out;
    append(out, param_views(s.depthwise, prefix + ".depthwise"));
    append(out, param_views(s.pointwise, prefix + ".pointwise"));
    return out;
}

std::vector<ParamView> param_views(ChannelAffine& s, const std::string& prefix) {
    return {
        {prefix + ".scale", {s.channels}, &s.scale, &s.sgrad},
        {prefix + ".shift", {s.channels}, &s.shift, &s.hgrad},
    };
}

std::vector<ParamView> param_views(CaParams& s, const std::string& prefix) {
    std::vector<ParamView> out;
    append(out, param_views(s.reduce, prefix + ".reduce"));
    append(out, param_views(s.expand, prefix + ".expand"));
    return out;
}

std::vector<ParamView> param_views(MfaParams& s, const std::string& prefix) {
    std::vector<ParamView> out;
    for (std::size_t b = 0; b < s.branches.size(); ++b)
        append(out, param_views(s.branches[b], prefix + ".branch" + std::to_string(b)));
    append(out, param_views(s.fusion, prefix + ".fusion"));
    return out;
}

std::vector<ParamView> param_views(BfaParams& s, const std::string& prefix) {
    std::vector<ParamView> out;
    append(out, param_views(s.gate_a, prefix + ".gate_a"));
    append(out, param_views(s.gate_b, prefix + ".gate_b"));
    append(out, param_views(s.fusion, prefix + ".fusion"));
    return out;
}

std::vector<ParamView> param_views(AggParams& s, const std::string& prefix) {
    std::vector<ParamView> out;
    append(out, param_views(s.mfa, prefix + ".mfa"));
    append(out, param_views(s.ca, prefix + ".ca"));
    append(out, param_views(s.bfa, prefix + ".bfa"));
    return out;
}

std::string serialize_params(std::span<const ParamView> views) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : views) {
        nlohmann::json entry;
        entry["name"] = v.name;
        entry["shape"] = v.shape;
        entry["values"] = *v.value;
        arr.push_back(std::move(entry));
    }
    return arr.dump(2);
}

void deserialize_params(const std::string& json_text, std::span<ParamView> views) {
    nlohmann::json arr;
    try {
        arr = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("parameter json: ") + e.what());
    }
    if (!arr.is_array()) throw ParseError("parameter json: expected a top-level array");
    for (const auto& entry : arr) {
        std::string name;
        std::vector<int> shape;
        std::vector<double> values;
        try {
            name = entry.at("name").get<std::string>();
            shape = entry.at("shape").get<std::vector<int>>();
            values = entry.at("values").get<std::vector<double>>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("parameter json: malformed entry: ") + e.what());
        }
        auto it = std::find_if(views.begin(), views.end(),
                               [&](const ParamView& v) { return v.name == name; });
        if (it == views.end()) throw ParseError("parameter json: unknown array '" + name + "'");
        if (shape != it->shape) throw ParseError("parameter json: shape mismatch for '" + name +
                                                 "'");
        if (values.size() != it->value->size())
            throw ParseError("parameter json: value count mismatch for '" + name + "'");
        *it->value = std::move(values);
    }
}

void randomize(std::span<ParamView> views, Rng& rng) {
    for (auto& v : views)
        for (double& x : *v.value) x = uniform_range(rng, -0.5, 0.5);
}

// ---------------------------------------------------------------------------
// tape

int Tape::push(Tensor val, std::function<void(Tape&)> pull) {
    nodes_.push_back(Node{std::move(val), Tensor{}, std::move(pull)});
    return static_cast<int>(nodes_.size()) - 1;
}

int Tape::input(Tensor x) { return push(std::move(x), nullptr); }

int Tape::conv1d(int x, ConvSpec& s) {
    const Tensor& in = value(x);
    require(in.channels == s.in_channels, "conv: input channel mismatch");
    require(s.kernel % 2 == 1 && s.dilation >= 1, "conv: bad kernel/dilation");
    require(static_cast<int>(s.weights.size()) == s.kernel * s.in_channels * s.out_channels &&
                static_cast<int>(s.bias.size()) == s.out_channels,
            "conv: weight array sizes do not match the spec");

    const int n = in.points, ci = s.in_channels, co = s.out_channels;
    const int pad = same_pad(s.kernel, s.dilation);
    Tensor out(n, co);
    for (int i = 0; i < n; ++i)
        for (int o = 0; o < co; ++o) {
            double acc = s.bias[o];
            for (int k = 0; k < s.kernel; ++k) {
                const int src = i + k * s.dilation - pad;
                if (src < 0 || src >= n) continue;
                const double* w = &s.weights[(static_cast<std::size_t>(k) * ci) * co + o];
                for (int c = 0; c < ci; ++c) acc += w[static_cast<std::size_t>(c) * co] * in.at(src, c);
            }
            out.at(i, o) = acc;
        }

    ConvSpec* spec = &s;
    return push(std::move(out), [x, spec](Tape& t) {
        const Tensor& in = t.value(x);
        const Tensor& gout = t.grad(t.last_);
        const int n = in.points, ci = spec->in_channels, co = spec->out_channels;
        const int pad = same_pad(spec->kernel, spec->dilation);
        Tensor& gin = t.grad_mut(x);
        for (int i = 0; i < n; ++i)
            for (int o = 0; o < co; ++o) {
                const double go = gout.at(i, o);
                if (go == 0.0) continue;
                spec->bgrad[o] += go;
                for (int k = 0; k < spec->kernel; ++k) {
                    const int src = i + k * spec->dilation - pad;
                    if (src < 0 || src >= n) continue;
                    for (int c = 0; c < ci; ++c) {
                        const std::size_t wi =
                            (static_cast<std::size_t>(k) * ci + c) * co + o;
                        spec->wgrad[wi] += go * in.at(src, c);
                        gin.at(src, c) += go * spec->weights[wi];
                    }
                }
            }
    });
}

int Tape::depthwise_conv1d(int x, DepthwiseSpec& s) {
    const Tensor& in = value(x);
    require(in.channels == s.channels, "depthwise: input channel mismatch");

    const int n = in.points, C = s.channels;
    const int pad = same_pad(s.kernel, s.dilation);
    Tensor out(n, C);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < C; ++c) {
            double acc = s.bias[c];
            for (int k = 0; k < s.kernel; ++k) {
                const int src = i + k * s.dilation - pad;
                if (src < 0 || src >= n) continue;
                acc += s.weights[static_cast<std::size_t>(k) * C + c] * in.at(src, c);
            }
            out.at(i, c) = acc;
        }

    DepthwiseSpec* spec = &s;
    return push(std::move(out), [x, spec](Tape& t) {
        const Tensor& in = t.value(x);
        const Tensor& gout = t.grad(t.last_);
        const int n = in.points, C = spec->channels;
        const int pad = same_pad(spec->kernel, spec->dilation);
        Tensor& gin = t.grad_mut(x);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < C; ++c) {
                const double go = gout.at(i, c);
                if (go == 0.0) continue;
                spec->bgrad[c] += go;
                for (int k = 0; k < spec->kernel; ++k) {
                    const int src = i + k * spec->dilation - pad;
                    if (src < 0 || src >= n) continue;
                    const std::size_t wi = static_cast<std::size_t>(k) * C + c;
                    spec->wgrad[wi] += go * in.at(src, c);
                    gin.at(src, c) += go * spec->weights[wi];
                }
            }
    });
}

int Tape::dense(int x, Dense& d) {
    const Tensor& in = value(x);
    require(in.channels == d.in, "dense: input size mismatch");

    Tensor out(in.points, d.out);
    for (int i = 0; i < in.points; ++i)
        for (int o = 0; o < d.out; ++o) {
            double acc = d.b[o];
            for (int c = 0; c < d.in; ++c)
                acc += d.w[static_cast<std::size_t>(c) * d.out + o] * in.at(i, c);
            out.at(i, o) = acc;
        }

    Dense* spec = &d;
    return push(std::move(out), [x, spec](Tape& t) {
        const Tensor& in = t.value(x);
        const Tensor& gout = t.grad(t.last_);
        Tensor& gin = t.grad_mut(x);
        for (int i = 0; i < in.points; ++i)
            for (int o = 0; o < spec->out; ++o) {
                const double go = gout.at(i, o);
                if (go == 0.0) continue;
                spec->bgrad[o] += go;
                for (int c = 0; c < spec->in; ++c) {
                    const std::size_t wi = static_cast<std::size_t>(c) * spec->out + o;
                    spec->wgrad[wi] += go * in.at(i, c);
                    gin.at(i, c) += go * spec->w[wi];
                }
            }
    });
}

int Tape::channel_affine(int x, ChannelAffine& a) {
    const Tensor& in = value(x);
    require(in.channels == a.channels, "affine: channel mismatch");

    Tensor out(in.points, in.channels);
    for (int i = 0; i < in.points; ++i)
        for (int c = 0; c < in.channels; ++c) out.at(i, c) = in.at(i, c) * a.scale[c] + a.shift[c];

    ChannelAffine* spec = &a;
    return push(std::move(out), [x, spec](Tape& t) {
        const Tensor& in = t.value(x);
        const Tensor& gout = t.grad(t.last_);
        Tensor& gin = t.grad_mut(x);
        for (int i = 0; i < in.points; ++i)
            for (int c = 0; c < in.channels; ++c) {
                const double go = gout.at(i, c);
                spec->sgrad[c] += go * in.at(i, c);
                spec->hgrad[c] += go;
                gin.at(i, c) += go * spec->scale[c];
            }
    });
}

int Tape::mean_points(int x) {
    const Tensor& in = value(x);
    require(in.points >= 1, "mean over points needs at least one point");

    Tensor out(1, in.channels);
    for (int c = 0; c < in.channels; ++c) {
        double acc = 0.0;
        for (int i = 0; i < in.points; ++i) acc += in.at(i, c);
        out.at(0, c) = acc / in.points;
    }

    return push(std::move(out), [x](Tape& t) {
        const Tensor& in = t.value(x);
        const Tensor& gout = t.grad(t.last_);
        Tensor& gin = t.grad_mut(x);
        for (int c = 0; c < in.channels; ++c) {
            const double g = gout.at(0, c) / in.points;
            for (int i = 0; i < in.points; ++i) gin.at(i, c) += g;
        }
    });
}

int Tape::relu(int x) {
    Tensor out = value(x);
    for (double& v : out.data) v = v > 0 ? v : 0.0;
    return push(std::move(out), [x](Tape& t) {
        const Tensor& in = t.value(x);
        const Tensor& gout = t.grad(t.last_);
        Tensor& gin = t.grad_mut(x);
        for (std::size_t i = 0; i < in.data.size(); ++i)
            if (in.data[i] > 0) gin.data[i] += gout.data[i];
    });
}

int Tape::sigmoid(int x) {
    Tensor out = value(x);
    for (double& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
    return push(std::move(out), [x](Tape& t) {
        const Tensor& s = t.value(t.last_);
        const Tensor& gout = t.grad(t.last_);
        Tensor& gin = t.grad_mut(x);
        for (std::size_t i = 0; i < s.data.size(); ++i)
            gin.data[i] += gout.data[i] * s.data[i] * (1.0 - s.data[i]);
    });
}

int Tape::add(int a, int b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    require(ta.same_shape(tb), "add: shape mismatch");
    Tensor out = ta;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += tb.data[i];
    return push(std::move(out), [a, b](Tape& t) {
        const Tensor& gout = t.grad(t.last_);
        Tensor& ga = t.grad_mut(a);
        Tensor& gb = t.grad_mut(b);
        for (std::size_t i = 0; i < gout.data.size(); ++i) {
            ga.data[i] += gout.data[i];
            gb.data[i] += gout.data[i];
        }
    });
}

int Tape::mul(int a, int b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    require(ta.same_shape(tb), "mul: shape mismatch");
    Tensor out = ta;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= tb.data[i];
    return push(std::move(out), [a, b](Tape& t) {
        const Tensor& ta = t.value(a);
        const Tensor& tb = t.value(b);
        const Tensor& gout = t.grad(t.last_);
        Tensor& ga = t.grad_mut(a);
        Tensor& gb = t.grad_mut(b);
        for (std::size_t i = 0; i < gout.data.size(); ++i) {
            ga.data[i] += gout.data[i] * tb.data[i];
            gb.data[i] += gout.data[i] * ta.data[i];
        }
    });
}

int Tape::scale_channels(int x, int s) {
    const Tensor& in = value(x);
    const Tensor& sc = value(s);
    require(sc.points == 1 && sc.channels == in.channels, "scale: gate must be (1, C)");
    Tensor out = in;
    for (int i = 0; i < in.points; ++i)
        for (int c = 0; c < in.channels; ++c) out.at(i, c) *= sc.at(0, c);
    return push(std::move(out), [x, s](Tape& t) {
        const Tensor& in = t.value(x);
        const Tensor& sc = t.value(s);
        const Tensor& gout = t.grad(t.last_);
        Tensor& gin = t.grad_mut(x);
        Tensor& gsc = t.grad_mut(s);
        for (int i = 0; i < in.points; ++i)
            for (int c = 0; c < in.channels; ++c) {
                gin.at(i, c) += gout.at(i, c) * sc.at(0, c);
                gsc.at(0, c) += gout.at(i, c) * in.at(i, c);
            }
    });
}

int Tape::concat_channels(std::span<const int> xs) {
    require(!xs.empty(), "concat: needs at least one input");
    const int n = value(xs[0]).points;
    int total = 0;
    for (int id : xs) {
        require(value(id).points == n, "concat: point counts differ");
        total += value(id).channels;
    }
    Tensor out(n, total);
    int base = 0;
    for (int id : xs) {
        const Tensor& in = value(id);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < in.channels; ++c) out.at(i, base + c) = in.at(i, c);
        base += in.channels;
    }
    std::vector<int> ids(xs.begin(), xs.end());
    return push(std::move(out), [ids](Tape& t) {
        const Tensor& gout = t.grad(t.last_);
        int base = 0;
        for (int id : ids) {
            Tensor& gin = t.grad_mut(id);
            const int ci = t.value(id).channels;
            for (int i = 0; i < gin.points; ++i)
                for (int c = 0; c < ci; ++c) gin.at(i, c) += gout.at(i, base + c);
            base += ci;
        }
    });
}

double Tape::sum_squares_half(int x) const {
    double acc = 0.0;
    for (double v : value(x).data) acc += v * v;
    return 0.5 * acc;
}

void Tape::backward(int root, const Tensor& seed) {
    require(value(root).same_shape(seed), "backward: seed shape mismatch");
    for (auto& node : nodes_) node.grad = Tensor(node.val.points, node.val.channels);
    nodes_[root].grad = seed;
    for (int id = root; id >= 0; --id) {
        if (!nodes_[id].pull) continue;
        last_ = id;
        nodes_[id].pull(*this);
    }
}

void Tape::backward_sum_squares(int root) { backward(root, value(root)); }

// ---------------------------------------------------------------------------
// block graphs

int build_ca(Tape& t, int x, CaParams& p) {
    const int pooled = t.mean_points(x);
    const int hidden = t.relu(t.dense(pooled, p.reduce));
    const int gates = t.sigmoid(t.dense(hidden, p.expand));
    return t.scale_channels(x, gates);
}

int build_mfa(Tape& t, int x, MfaParams& p) {
    require(!p.branches.empty(), "mfa: needs at least one branch");
    std::vector<int> branch_ids;
    branch_ids.reserve(p.branches.size());
    for (auto& b : p.branches) branch_ids.push_back(t.conv1d(x, b));
    const int cat = t.concat_channels(branch_ids);
    require(p.fusion.kernel == 1, "mfa: fusion conv must have kernel 1");
    return t.conv1d(cat, p.fusion);
}

int build_bfa(Tape& t, int a, int b, BfaParams& p) {
    const int gate_for_b = t.sigmoid(t.conv1d(a, p.gate_a));
    const int gate_for_a = t.sigmoid(t.conv1d(b, p.gate_b));
    const int mixed = t.add(t.mul(a, gate_for_a), t.mul(b, gate_for_b));
    return t.conv1d(mixed, p.fusion);
}

int build_aggregated(Tape& t, int heavy, int light, AggParams& p) {
    const int features = build_mfa(t, heavy, p.mfa);
    const int attended = build_ca(t, features, p.ca);
    const int rechecked = t.add(attended, features);
    return build_bfa(t, rechecked, light, p.bfa);
}

int build_sep_conv(Tape& t, int x, SepConvSpec& p) {
    return t.conv1d(t.depthwise_conv1d(x, p.depthwise), p.pointwise);
}

int build_res_unit(Tape& t, int x, ConvSpec& p) {
    require(p.in_channels == p.out_channels, "res unit: conv must preserve channels");
    return t.add(x, t.conv1d(x, p));
}

// ---------------------------------------------------------------------------
// forward-only wrappers (gradient buffers are never touched)

Tensor conv1d(const Tensor& x, const ConvSpec& s) {
    Tape t;
    return t.value(t.conv1d(t.input(x), const_cast<ConvSpec&>(s)));
}

Tensor sep_conv1d(const Tensor& x, const SepConvSpec& s) {
    Tape t;
    return t.value(build_sep_conv(t, t.input(x), const_cast<SepConvSpec&>(s)));
}

Tensor res_unit(const Tensor& x, const ConvSpec& s) {
    Tape t;
    return t.value(build_res_unit(t, t.input(x), const_cast<ConvSpec&>(s)));
}

Tensor channel_attention(const Tensor& x, const CaParams& p) {
    Tape t;
    return t.value(build_ca(t, t.input(x), const_cast<CaParams&>(p)));
}

Tensor mfa_forward(const Tensor& x, const MfaParams& p) {
    Tape t;
    return t.value(build_mfa(t, t.input(x), const_cast<MfaParams&>(p)));
}

Tensor bfa_forward(const Tensor& a, const Tensor& b, const BfaParams& p) {
    Tape t;
    return t.value(build_bfa(t, t.input(a), t.input(b), const_cast<BfaParams&>(p)));
}

Tensor aggregated_forward(const Tensor& heavy, const Tensor& light, const AggParams& p) {
    Tape t;
    return t.value(
        build_aggregated(t, t.input(heavy), t.input(light), const_cast<AggParams&>(p)));
}

// ---------------------------------------------------------------------------
// gradient check

double grad_check(const std::function<int(Tape&)>& forward, std::span<ParamView> params,
                  double step) {
    if (!(step > 0)) throw DomainError("grad check: step must be positive");
    for (auto& v : params) std::fill(v.grad->begin(), v.grad->end(), 0.0);

    Tape t;
    const int out = forward(t);
    for (double v : t.value(out).data)
        if (!std::isfinite(v)) throw NumericError("grad check: non-finite forward value");
    t.backward_sum_squares(out);

    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (auto& v : params) analytic.push_back(*v.grad);

    double worst = 0.0;
    for (std::size_t p = 0; p < params.size(); ++p) {
        auto& values = *params[p].value;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double orig = values[i];
            values[i] = orig + step;
            Tape tp;
            const double lp = tp.sum_squares_half(forward(tp));
            values[i] = orig - step;
            Tape tm;
            const double lm = tm.sum_squares_half(forward(tm));
            values[i] = orig;
            const double fd = (lp - lm) / (2.0 * step);
            const double rel =
                std::fabs(fd - analytic[p][i]) / std::max(std::fabs(fd), 1e-8);
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

}  // namespace hcl::blocks
