#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>

#include "lexrl/errors.hpp"
#include "lexrl/neural.hpp"

using namespace lexrl;

namespace {

MlpParameters tiny_net() {
    // 2-2-1 network with hand-picked weights.
    MlpParameters net;
    net.arch = {2, 2, 1};
    Eigen::MatrixXd w0(2, 2);
    w0 << 1.0, -1.0, 0.5, 2.0;
    Eigen::MatrixXd w1(1, 2);
    w1 << 1.0, 1.0;
    net.weights = {w0, w1};
    Eigen::VectorXd b0(2);
    b0 << 0.1, -0.2;
    Eigen::VectorXd b1(1);
    b1 << 0.5;
    net.biases = {b0, b1};
    return net;
}

Minibatch random_batch(const MlpParameters& net, int size, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_int_distribution<int> head(0, net.output_dim() - 1);
    Minibatch batch;
    batch.features.resize(net.input_dim(), size);
    for (int j = 0; j < size; ++j) {
        for (int i = 0; i < net.input_dim(); ++i) {
            batch.features(i, j) = unit(rng);
        }
        batch.actions.push_back(head(rng));
        batch.targets.push_back(unit(rng));
    }
    return batch;
}

double max_fd_relative_error(const MlpParameters& net, const Minibatch& batch) {
    const MlpGradient grad = gradient(net, batch);
    double worst = 0.0;
    MlpParameters probe = net;
    const auto fd_error = [&](double& param, double analytic, double h) {
        const double saved = param;
        param = saved + h;
        const double up = batch_loss(probe, batch);
        param = saved - h;
        const double down = batch_loss(probe, batch);
        param = saved;
        const double fd = (up - down) / (2.0 * h);
        const double scale = std::max({std::abs(analytic), std::abs(fd), 1e-3});
        return std::abs(analytic - fd) / scale;
    };
    const auto check = [&](double& param, double analytic) {
        double rel = fd_error(param, analytic, 1e-5);
        if (rel >= 1e-4) {
            // A ReLU kink inside the difference interval makes the h = 1e-5
            // probe one-sided; a genuine gradient bug survives any h.
            rel = fd_error(param, analytic, 1e-5 / 32.0);
        }
        worst = std::max(worst, rel);
    };
    for (std::size_t l = 0; l < probe.num_layers(); ++l) {
        for (Eigen::Index r = 0; r < probe.weights[l].rows(); ++r) {
            for (Eigen::Index c = 0; c < probe.weights[l].cols(); ++c) {
                check(probe.weights[l](r, c), grad.weights[l](r, c));
            }
            check(probe.biases[l](r), grad.biases[l](r));
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("init_mlp shapes, zero biases and fan-in bound") {
    std::mt19937_64 rng(42);
    const MlpParameters net = init_mlp({4, 64, 64, 5}, rng);
    REQUIRE(net.num_layers() == 3);
    CHECK(net.input_dim() == 4);
    CHECK(net.output_dim() == 5);
    CHECK(net.weights[0].rows() == 64);
    CHECK(net.weights[0].cols() == 4);
    CHECK(net.weights[1].rows() == 64);
    CHECK(net.weights[1].cols() == 64);
    CHECK(net.weights[2].rows() == 5);
    CHECK(net.weights[2].cols() == 64);

    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        CHECK(net.biases[l].isZero(0.0));
        const double bound = std::sqrt(6.0 / static_cast<double>(net.weights[l].cols()));
        CHECK(net.weights[l].cwiseAbs().maxCoeff() <= bound);
        // Fills most of the allowed range: layers here have >= 256 draws.
        CHECK(net.weights[l].cwiseAbs().maxCoeff() > 0.8 * bound);
        CHECK(net.weights[l].minCoeff() < 0.0);
    }
}

TEST_CASE("init_mlp is deterministic per seed") {
    const NetworkArchitecture arch = constraint_critic_arch(4, 5);
    REQUIRE(arch.widths() == std::vector<int>{4, 64, 64, 5});
    const MlpParameters a = init_mlp(arch, 7);
    const MlpParameters b = init_mlp(arch, 7);
    const MlpParameters c = init_mlp(arch, 8);
    CHECK(a.weights[0] == b.weights[0]);
    CHECK(a.weights[2] == b.weights[2]);
    CHECK(a.weights[0] != c.weights[0]);

    CHECK(primary_critic_arch(4, 5).widths() == std::vector<int>{4, 64, 16, 5});
}

TEST_CASE("forward matches a hand-computed 2-2-1 trace") {
    const MlpParameters net = tiny_net();
    Eigen::VectorXd x(2);
    x << 1.0, 2.0;
    // pre-activations: [1 - 2 + 0.1, 0.5 + 4 - 0.2] = [-0.9, 4.3]
    // relu: [0, 4.3]; output: 0 + 4.3 + 0.5 = 4.8
    const Eigen::VectorXd out = forward_one(net, x);
    REQUIRE(out.size() == 1);
    CHECK(out(0) == doctest::Approx(4.8).epsilon(1e-14));

    Eigen::MatrixXd batch(2, 2);
    batch.col(0) = x;
    batch.col(1) << 0.0, 0.0;
    // second column: relu([0.1, -0.2]) = [0.1, 0]; output 0.1 + 0.5 = 0.6
    const Eigen::MatrixXd outs = forward(net, batch);
    CHECK(outs(0, 0) == doctest::Approx(4.8));
    CHECK(outs(0, 1) == doctest::Approx(0.6));

    // Repeated evaluation is bit-identical.
    CHECK(forward(net, batch) == outs);
}

TEST_CASE("forward rejects wrong input dimension") {
    const MlpParameters net = tiny_net();
    Eigen::MatrixXd bad(3, 1);
    bad.setZero();
    CHECK_THROWS_AS(forward(net, bad), std::invalid_argument);
}

TEST_CASE("batch_loss is the mean squared residual on taken heads") {
    const MlpParameters net = tiny_net();
    Minibatch batch;
    batch.features.resize(2, 2);
    batch.features.col(0) << 1.0, 2.0;   // output 4.8
    batch.features.col(1) << 0.0, 0.0;   // output 0.6
    batch.actions = {0, 0};
    batch.targets = {4.8, 1.6};
    // residuals: 0 and -1 → mean of squares = 0.5
    CHECK(batch_loss(net, batch) == doctest::Approx(0.5).epsilon(1e-12));

    batch.targets = {4.8, 0.6};
    CHECK(batch_loss(net, batch) == doctest::Approx(0.0));
}

TEST_CASE("zero residual gives zero gradient") {
    const MlpParameters net = tiny_net();
    Minibatch batch;
    batch.features.resize(2, 1);
    batch.features.col(0) << 1.0, 2.0;
    batch.actions = {0};
    batch.targets = {4.8};
    const MlpGradient grad = gradient(net, batch);
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        CHECK(grad.weights[l].isZero(1e-14));
        CHECK(grad.biases[l].isZero(1e-14));
    }
}

TEST_CASE("rectifier derivative at exactly zero is zero") {
    // 1-1-1 net, input 0 → hidden pre-activation exactly 0. With the
    // 0-at-0 convention nothing flows back to the first layer's bias.
    MlpParameters net;
    net.arch = {1, 1, 1};
    net.weights = {Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Constant(1, 1, 2.0)};
    net.biases = {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};

    Minibatch batch;
    batch.features = Eigen::MatrixXd::Zero(1, 1);
    batch.actions = {0};
    batch.targets = {1.0};  // output is 0 → residual -1

    const MlpGradient grad = gradient(net, batch);
    CHECK(grad.biases[1](0) == doctest::Approx(-2.0));  // 2·(out − y)
    CHECK(grad.biases[0](0) == 0.0);
    CHECK(grad.weights[0](0, 0) == 0.0);
}

TEST_CASE("gradient matches central finite differences") {
    std::mt19937_64 rng(31);
    for (const auto& widths :
         {std::vector<int>{4, 64, 64, 5}, std::vector<int>{4, 64, 16, 5},
          std::vector<int>{3, 8, 2}}) {
        const MlpParameters net = init_mlp(widths, rng);
        const Minibatch batch = random_batch(net, 16, rng);
        CHECK(max_fd_relative_error(net, batch) < 1e-4);
    }
}

TEST_CASE("sgd_step applies p -= lr * g and validates") {
    MlpParameters net = tiny_net();
    MlpGradient grad;
    grad.weights = {Eigen::MatrixXd::Constant(2, 2, 1.0), Eigen::MatrixXd::Constant(1, 2, 2.0)};
    grad.biases = {Eigen::VectorXd::Constant(2, 3.0), Eigen::VectorXd::Constant(1, 4.0)};
    sgd_step(net, grad, 0.1);
    CHECK(net.weights[0](0, 0) == doctest::Approx(0.9));
    CHECK(net.weights[1](0, 1) == doctest::Approx(0.8));
    CHECK(net.biases[0](1) == doctest::Approx(-0.5));
    CHECK(net.biases[1](0) == doctest::Approx(0.1));

    CHECK_THROWS_AS(sgd_step(net, grad, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sgd_step(net, grad, -1.0), std::invalid_argument);
}

TEST_CASE("a gradient step with tiny lr changes the loss by O(lr)") {
    std::mt19937_64 rng(5);
    const MlpParameters net = init_mlp({4, 16, 3}, rng);
    const Minibatch batch = random_batch(net, 8, rng);
    const double before = batch_loss(net, batch);
    const MlpGradient grad = gradient(net, batch);

    for (const double lr : {1e-6, 1e-8, 1e-10}) {
        MlpParameters stepped = net;
        sgd_step(stepped, grad, lr);
        const double after = batch_loss(stepped, batch);
        CHECK(after <= before);  // descent direction
        // First-order bound: |Δloss| ≤ lr · ‖g‖² · (1 + o(1)).
        double g_norm_sq = 0.0;
        for (std::size_t l = 0; l < grad.weights.size(); ++l) {
            g_norm_sq += grad.weights[l].squaredNorm() + grad.biases[l].squaredNorm();
        }
        CHECK(std::abs(after - before) <= 2.0 * lr * g_norm_sq + 1e-15);
    }
}

TEST_CASE("soft_update blends toward online") {
    std::mt19937_64 rng(11);
    const MlpParameters online = init_mlp({2, 4, 2}, rng);
    MlpParameters target = init_mlp({2, 4, 2}, rng);
    const MlpParameters before = target;

    soft_update(target, online, 0.1);
    for (std::size_t l = 0; l < target.num_layers(); ++l) {
        const Eigen::MatrixXd expect =
            0.1 * online.weights[l] + 0.9 * before.weights[l];
        CHECK((target.weights[l] - expect).cwiseAbs().maxCoeff() < 1e-15);
        // Contraction toward online.
        CHECK((target.weights[l] - online.weights[l]).cwiseAbs().maxCoeff() <=
              (before.weights[l] - online.weights[l]).cwiseAbs().maxCoeff() + 1e-15);
    }

    SUBCASE("tau 1 copies, tau 0 is identity") {
        MlpParameters t1 = before;
        soft_update(t1, online, 1.0);
        CHECK(t1.weights[0] == online.weights[0]);
        MlpParameters t0 = before;
        soft_update(t0, online, 0.0);
        CHECK(t0.weights[0] == before.weights[0]);
    }
    SUBCASE("rejects bad tau and mismatched shapes") {
        MlpParameters t = before;
        CHECK_THROWS_AS(soft_update(t, online, -0.1), std::invalid_argument);
        CHECK_THROWS_AS(soft_update(t, online, 1.1), std::invalid_argument);
        std::mt19937_64 rng2(1);
        const MlpParameters other = init_mlp({2, 5, 2}, rng2);
        CHECK_THROWS_AS(soft_update(t, other, 0.1), std::invalid_argument);
    }
}

TEST_CASE("schedule_value decays geometrically after the onset") {
    const ScheduleConfig cfg;  // base_lr 1e-4, base_epsilon 0.5, 0.99 after 500
    CHECK(schedule_value(cfg, ScheduleKind::LearningRate, 1) == doctest::Approx(1e-4));
    CHECK(schedule_value(cfg, ScheduleKind::LearningRate, 400) == doctest::Approx(1e-4));
    CHECK(schedule_value(cfg, ScheduleKind::LearningRate, 501) == doctest::Approx(1e-4));
    CHECK(schedule_value(cfg, ScheduleKind::LearningRate, 502) == doctest::Approx(0.99e-4));
    CHECK(schedule_value(cfg, ScheduleKind::Epsilon, 1) == doctest::Approx(0.5));
    CHECK(schedule_value(cfg, ScheduleKind::Epsilon, 501) == doctest::Approx(0.5));
    CHECK(schedule_value(cfg, ScheduleKind::Epsilon, 502) == doctest::Approx(0.495));
    CHECK(schedule_value(cfg, ScheduleKind::Epsilon, 503) == doctest::Approx(0.5 * 0.99 * 0.99));

    ScheduleConfig immediate = cfg;
    immediate.decay_onset = 0;
    CHECK(schedule_value(immediate, ScheduleKind::Epsilon, 1) == doctest::Approx(0.5));
    CHECK(schedule_value(immediate, ScheduleKind::Epsilon, 2) == doctest::Approx(0.495));

    CHECK_THROWS_AS(schedule_value(cfg, ScheduleKind::Epsilon, 0), std::invalid_argument);
    ScheduleConfig bad = cfg;
    bad.decay_rate = 0.0;
    CHECK_THROWS_AS(schedule_value(bad, ScheduleKind::Epsilon, 1), std::invalid_argument);
    bad.decay_rate = 1.5;
    CHECK_THROWS_AS(schedule_value(bad, ScheduleKind::Epsilon, 1), std::invalid_argument);
}

TEST_CASE("network files round-trip bit-exactly") {
    std::mt19937_64 rng(77);
    const MlpParameters net = init_mlp({4, 64, 16, 5}, rng);
    const auto path = std::filesystem::temp_directory_path() / "lexrl_roundtrip.net";
    save_network(net, path);
    const MlpParameters loaded = load_network(path);
    REQUIRE(loaded.arch == net.arch);
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        CHECK(loaded.weights[l] == net.weights[l]);
        CHECK(loaded.biases[l] == net.biases[l]);
    }
    std::filesystem::remove(path);
}

TEST_CASE("load_network rejects malformed files") {
    const auto dir = std::filesystem::temp_directory_path();

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_network(dir / "lexrl_does_not_exist.net"), IoError);
    }
    SUBCASE("bad magic") {
        const auto path = dir / "lexrl_badmagic.net";
        std::ofstream(path, std::ios::binary) << "NOTANETX" << std::string(16, '\0');
        CHECK_THROWS_AS(load_network(path), FormatError);
        std::filesystem::remove(path);
    }
    SUBCASE("unsupported version") {
        std::mt19937_64 rng(1);
        const MlpParameters net = init_mlp({2, 2}, rng);
        const auto path = dir / "lexrl_badversion.net";
        save_network(net, path);
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(8);
        const std::uint32_t v = 99;
        f.write(reinterpret_cast<const char*>(&v), 4);
        f.close();
        CHECK_THROWS_AS(load_network(path), VersionError);
        std::filesystem::remove(path);
    }
    SUBCASE("truncated payload") {
        std::mt19937_64 rng(1);
        const MlpParameters net = init_mlp({4, 8, 3}, rng);
        const auto path = dir / "lexrl_truncated.net";
        save_network(net, path);
        const auto size = std::filesystem::file_size(path);
        std::filesystem::resize_file(path, size - 9);
        CHECK_THROWS_AS(load_network(path), FormatError);
        std::filesystem::remove(path);
    }
    SUBCASE("trailing bytes") {
        std::mt19937_64 rng(1);
        const MlpParameters net = init_mlp({2, 2}, rng);
        const auto path = dir / "lexrl_trailing.net";
        save_network(net, path);
        std::ofstream(path, std::ios::binary | std::ios::app) << "x";
        CHECK_THROWS_AS(load_network(path), FormatError);
        std::filesystem::remove(path);
    }
    SUBCASE("layers that do not chain") {
        const auto path = dir / "lexrl_nochain.net";
        std::ofstream f(path, std::ios::binary);
        f << "LEXRLNET";
        const auto u32 = [&](std::uint32_t v) {
            f.write(reinterpret_cast<const char*>(&v), 4);
        };
        u32(1);   // version
        u32(2);   // layers
        u32(2);   // layer 0: 2 rows
        u32(3);   // layer 0: 3 cols
        for (int i = 0; i < 2 * 3 + 2; ++i) {
            const double d = 0.0;
            f.write(reinterpret_cast<const char*>(&d), 8);
        }
        u32(4);   // layer 1 rows
        u32(5);   // layer 1 cols: must be 2 to chain
        f.close();
        CHECK_THROWS_AS(load_network(path), ShapeError);
        std::filesystem::remove(path);
    }
}
