#include "lexrl/neural.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "lexrl/errors.hpp"
#include "lexrl/rng.hpp"

namespace lexrl {

namespace {

constexpr char kMagic[8] = {'L', 'E', 'X', 'R', 'L', 'N', 'E', 'T'};
constexpr std::uint32_t kVersion = 1;

void check_arch(const std::vector<int>& arch) {
    if (arch.size() < 2) {
        throw std::invalid_argument("network arch needs an input and an output layer");
    }
    for (int width : arch) {
        if (width <= 0) {
            throw std::invalid_argument("network arch widths must be positive");
        }
    }
}

void check_compatible(const MlpParameters& a, const MlpParameters& b, const char* what) {
    if (a.arch != b.arch) {
        throw std::invalid_argument(std::string(what) + ": network architectures differ");
    }
}

// Forward pass keeping pre-activations and activations of every layer;
// activations[0] is the input batch.
struct ForwardTrace {
    std::vector<Eigen::MatrixXd> pre;
    std::vector<Eigen::MatrixXd> activations;
};

ForwardTrace traced_forward(const MlpParameters& net, const Eigen::MatrixXd& inputs) {
    ForwardTrace trace;
    trace.activations.push_back(inputs);
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        Eigen::MatrixXd z =
            (net.weights[l] * trace.activations.back()).colwise() + net.biases[l];
        trace.pre.push_back(z);
        if (l + 1 < net.num_layers()) {
            trace.activations.push_back(z.cwiseMax(0.0));
        } else {
            trace.activations.push_back(std::move(z));
        }
    }
    return trace;
}

void check_batch(const MlpParameters& net, const Minibatch& batch) {
    if (batch.features.rows() != net.input_dim()) {
        throw std::invalid_argument("minibatch feature rows do not match network input dim");
    }
    if (batch.features.cols() != batch.size() ||
        batch.targets.size() != batch.actions.size()) {
        throw std::invalid_argument("minibatch column/action/target counts disagree");
    }
    if (batch.size() == 0) {
        throw std::invalid_argument("minibatch is empty");
    }
    for (int a : batch.actions) {
        if (a < 0 || a >= net.output_dim()) {
            throw std::out_of_range("minibatch action index outside network output range");
        }
    }
}

void write_u32(std::ostream& out, std::uint32_t value) {
    char bytes[4];
    for (int i = 0; i < 4; ++i) {
        bytes[i] = static_cast<char>((value >> (8 * i)) & 0xffu);
    }
    out.write(bytes, 4);
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    if (!in) {
        throw FormatError("network file truncated while reading a u32 field");
    }
    std::uint32_t value = 0;
    for (int i = 0; i < 4; ++i) {
        value |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
    }
    return value;
}

void write_f64(std::ostream& out, double value) {
    std::uint64_t bits;
    std::memcpy(&bits, &value, sizeof bits);
    char bytes[8];
    for (int i = 0; i < 8; ++i) {
        bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
    }
    out.write(bytes, 8);
}

double read_f64(std::istream& in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in) {
        throw FormatError("network file truncated while reading an f64 field");
    }
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
        bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    }
    double value;
    std::memcpy(&value, &bits, sizeof value);
    return value;
}

}  // namespace

std::vector<int> NetworkArchitecture::widths() const {
    std::vector<int> w;
    w.push_back(input_dim);
    w.insert(w.end(), hidden_sizes.begin(), hidden_sizes.end());
    w.push_back(output_dim);
    return w;
}

NetworkArchitecture constraint_critic_arch(int input_dim, int num_actions) {
    return {input_dim, {64, 64}, num_actions};
}

NetworkArchitecture primary_critic_arch(int input_dim, int num_actions) {
    return {input_dim, {64, 16}, num_actions};
}

NetworkArchitecture MlpParameters::architecture() const {
    NetworkArchitecture a;
    a.input_dim = arch.front();
    a.output_dim = arch.back();
    a.hidden_sizes.assign(arch.begin() + 1, arch.end() - 1);
    return a;
}

MlpParameters init_mlp(const std::vector<int>& widths, std::mt19937_64& rng) {
    check_arch(widths);
    MlpParameters net;
    net.arch = widths;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const int fan_in = widths[l];
        const int fan_out = widths[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
        Eigen::MatrixXd w(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r) {
            for (int c = 0; c < fan_in; ++c) {
                w(r, c) = uniform_double(rng, -bound, bound);
            }
        }
        net.weights.push_back(std::move(w));
        net.biases.push_back(Eigen::VectorXd::Zero(fan_out));
    }
    return net;
}

MlpParameters init_mlp(const NetworkArchitecture& arch, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return init_mlp(arch.widths(), rng);
}

Eigen::MatrixXd forward(const MlpParameters& net, const Eigen::MatrixXd& inputs) {
    if (inputs.rows() != net.input_dim()) {
        throw std::invalid_argument("forward: input rows do not match network input dim");
    }
    Eigen::MatrixXd a = inputs;
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        Eigen::MatrixXd z = (net.weights[l] * a).colwise() + net.biases[l];
        a = (l + 1 < net.num_layers()) ? z.cwiseMax(0.0).eval() : std::move(z);
    }
    return a;
}

Eigen::VectorXd forward_one(const MlpParameters& net, const Eigen::VectorXd& input) {
    return forward(net, input);
}

double batch_loss(const MlpParameters& net, const Minibatch& batch) {
    check_batch(net, batch);
    const Eigen::MatrixXd q = forward(net, batch.features);
    double acc = 0.0;
    for (int i = 0; i < batch.size(); ++i) {
        const double diff = q(batch.actions[static_cast<std::size_t>(i)], i) -
                            batch.targets[static_cast<std::size_t>(i)];
        acc += diff * diff;
    }
    return acc / batch.size();
}

MlpGradient gradient(const MlpParameters& net, const Minibatch& batch) {
    check_batch(net, batch);
    const ForwardTrace trace = traced_forward(net, batch.features);
    const int n = batch.size();
    const std::size_t layers = net.num_layers();

    // Loss gradient feeds only the trained head of each sample.
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(net.output_dim(), n);
    const Eigen::MatrixXd& out = trace.activations.back();
    for (int i = 0; i < n; ++i) {
        const int a = batch.actions[static_cast<std::size_t>(i)];
        delta(a, i) = 2.0 * (out(a, i) - batch.targets[static_cast<std::size_t>(i)]) / n;
    }

    MlpGradient grad;
    grad.weights.resize(layers);
    grad.biases.resize(layers);
    for (std::size_t l = layers; l-- > 0;) {
        grad.weights[l] = delta * trace.activations[l].transpose();
        grad.biases[l] = delta.rowwise().sum();
        if (l > 0) {
            delta = (net.weights[l].transpose() * delta).eval();
            delta = delta.cwiseProduct(
                (trace.pre[l - 1].array() > 0.0).cast<double>().matrix());
        }
    }
    return grad;
}

void sgd_step(MlpParameters& net, const MlpGradient& grad, double learning_rate) {
    if (grad.weights.size() != net.num_layers() || grad.biases.size() != net.num_layers()) {
        throw std::invalid_argument("sgd_step: gradient layer count does not match network");
    }
    if (!(learning_rate > 0.0)) {
        throw std::invalid_argument("sgd_step: learning rate must be positive");
    }
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        if (!grad.weights[l].allFinite() || !grad.biases[l].allFinite()) {
            throw std::invalid_argument("sgd_step: gradient contains non-finite entries");
        }
        net.weights[l] -= learning_rate * grad.weights[l];
        net.biases[l] -= learning_rate * grad.biases[l];
    }
}

void soft_update(MlpParameters& target, const MlpParameters& online, double tau) {
    check_compatible(target, online, "soft_update");
    if (!(tau >= 0.0) || !(tau <= 1.0)) {
        throw std::invalid_argument("soft_update: tau must lie in [0, 1]");
    }
    for (std::size_t l = 0; l < target.num_layers(); ++l) {
        target.weights[l] = tau * online.weights[l] + (1.0 - tau) * target.weights[l];
        target.biases[l] = tau * online.biases[l] + (1.0 - tau) * target.biases[l];
    }
}

double schedule_value(const ScheduleConfig& cfg, ScheduleKind kind, std::int64_t t) {
    if (t < 1) {
        throw std::invalid_argument("schedule_value: t counts from 1");
    }
    if (!(cfg.decay_rate > 0.0) || !(cfg.decay_rate <= 1.0)) {
        throw std::invalid_argument("schedule_value: decay_rate must lie in (0, 1]");
    }
    const double base = kind == ScheduleKind::LearningRate ? cfg.base_lr : cfg.base_epsilon;
    if (!(base > 0.0)) {
        throw std::invalid_argument("schedule_value: base value must be positive");
    }
    const std::int64_t effective = std::max<std::int64_t>(1, t - cfg.decay_onset);
    return base * std::pow(cfg.decay_rate, static_cast<double>(effective - 1));
}

void save_network(const MlpParameters& net, const std::filesystem::path& path) {
    check_arch(net.arch);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(kMagic, sizeof kMagic);
    write_u32(out, kVersion);
    write_u32(out, static_cast<std::uint32_t>(net.num_layers()));
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        const Eigen::MatrixXd& w = net.weights[l];
        write_u32(out, static_cast<std::uint32_t>(w.rows()));
        write_u32(out, static_cast<std::uint32_t>(w.cols()));
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                write_f64(out, w(r, c));
            }
        }
        for (Eigen::Index r = 0; r < net.biases[l].size(); ++r) {
            write_f64(out, net.biases[l](r));
        }
    }
    if (!out) {
        throw IoError("failed while writing " + path.string());
    }
}

MlpParameters load_network(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    char magic[sizeof kMagic];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
        throw FormatError(path.string() + " is not a network file (bad magic)");
    }
    const std::uint32_t version = read_u32(in);
    if (version != kVersion) {
        throw VersionError(path.string() + ": unsupported network file version " +
                           std::to_string(version));
    }
    const std::uint32_t layers = read_u32(in);
    if (layers == 0 || layers > 1024) {
        throw ShapeError(path.string() + ": implausible layer count " + std::to_string(layers));
    }

    MlpParameters net;
    for (std::uint32_t l = 0; l < layers; ++l) {
        const std::uint32_t rows = read_u32(in);
        const std::uint32_t cols = read_u32(in);
        if (rows == 0 || cols == 0 || rows > 1'000'000 || cols > 1'000'000) {
            throw ShapeError(path.string() + ": implausible layer shape " +
                             std::to_string(rows) + "x" + std::to_string(cols));
        }
        if (l == 0) {
            net.arch.push_back(static_cast<int>(cols));
        } else if (net.arch.back() != static_cast<int>(cols)) {
            throw ShapeError(path.string() + ": layer " + std::to_string(l) +
                             " input width does not chain with the previous layer");
        }
        net.arch.push_back(static_cast<int>(rows));
        Eigen::MatrixXd w(rows, cols);
        for (std::uint32_t r = 0; r < rows; ++r) {
            for (std::uint32_t c = 0; c < cols; ++c) {
                w(r, c) = read_f64(in);
            }
        }
        Eigen::VectorXd b(rows);
        for (std::uint32_t r = 0; r < rows; ++r) {
            b(r) = read_f64(in);
        }
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    in.peek();
    if (!in.eof()) {
        throw FormatError(path.string() + ": trailing bytes after the final layer");
    }
    return net;
}

}  // namespace lexrl
