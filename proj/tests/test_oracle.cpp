#include <cmath>
#include <random>
#include <sstream>

#include "catch_amalgamated.hpp"
#include "stobb/oracle.hpp"

using namespace stobb;

namespace {

NetworkModel identity2() {
    NetworkModel::Layer l;
    l.in = 2;
    l.out = 2;
    l.weights = {1, 0, 0, 1};
    l.bias = {0, 0};
    return NetworkModel(2, 2, {l});
}

NetworkModel random_net(std::mt19937& rng, std::size_t in, std::vector<std::size_t> hidden,
                        std::size_t out) {
    std::normal_distribution<double> w(0, 0.5);
    std::vector<NetworkModel::Layer> layers;
    std::size_t prev = in;
    hidden.push_back(out);
    for (std::size_t dim : hidden) {
        NetworkModel::Layer l;
        l.in = prev;
        l.out = dim;
        l.weights.resize(prev * dim);
        l.bias.resize(dim);
        for (double& v : l.weights) v = w(rng);
        for (double& v : l.bias) v = w(rng);
        layers.push_back(std::move(l));
        prev = dim;
    }
    return NetworkModel(in, int(out), std::move(layers));
}

// straightforward reimplementation used as the dual route
Vector forward_reference(const NetworkModel& net, const Vector& x) {
    Vector cur = x;
    const auto& layers = net.layers();
    for (std::size_t li = 0; li < layers.size(); ++li) {
        Vector next(layers[li].out);
        for (std::size_t r = 0; r < layers[li].out; ++r) {
            double acc = layers[li].bias[r];
            for (std::size_t c = 0; c < layers[li].in; ++c)
                acc += layers[li].weights[r * layers[li].in + c] * cur[c];
            next[r] = (li + 1 < layers.size() && acc < 0) ? 0 : acc;
        }
        cur = next;
    }
    return cur;
}

}  // namespace

TEST_CASE("identity network predicts argmax, ties to lowest class") {
    NetworkModel net = identity2();
    CHECK(net.predict({0.2, 0.7}) == 1);
    CHECK(net.predict({0.7, 0.2}) == 0);
    CHECK(net.predict({0.5, 0.5}) == 0);
    CHECK_THROWS_AS(net.predict({1.0}), ContractViolation);
}

TEST_CASE("network shape validation") {
    NetworkModel::Layer bad;
    bad.in = 3;
    bad.out = 2;
    bad.weights = {1, 2, 3};  // wrong size
    bad.bias = {0, 0};
    CHECK_THROWS_AS(NetworkModel(3, 2, {bad}), ContractViolation);
}

TEST_CASE("lookup model") {
    LookupModel m(2, 2);
    m.insert({0, 0}, 0);
    m.insert({1, 1}, 1);
    CHECK(m.predict({1, 1}) == 1);
    CHECK_THROWS_WITH(m.predict({2, 2}), Catch::Matchers::ContainsSubstring("not covered"));
}

TEST_CASE("predict_batch matches mapped singles") {
    LookupModel m(1, 2);
    m.insert({0}, 0);
    m.insert({1}, 1);
    CHECK(m.predict_batch({}).empty());
    CHECK(m.predict_batch({{1.0}}) == std::vector<ClassId>{1});

    std::mt19937 rng(3);
    NetworkModel net = random_net(rng, 4, {8, 8}, 3);
    std::uniform_real_distribution<double> val(-2, 2);
    std::vector<Vector> xs;
    for (int i = 0; i < 100; ++i) {
        Vector x(4);
        for (double& v : x) v = val(rng);
        xs.push_back(x);
    }
    auto batch = net.predict_batch(xs);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(batch[i] == net.predict(xs[i]));
}

TEST_CASE("forward pass matches independent reimplementation") {
    std::mt19937 rng(17);
    NetworkModel net = random_net(rng, 7, {32, 32, 32, 32}, 3);
    std::uniform_real_distribution<double> val(-2, 2);
    for (int i = 0; i < 100; ++i) {
        Vector x(7);
        for (double& v : x) v = val(rng);
        Vector got = net.logits(x), want = forward_reference(net, x);
        for (std::size_t j = 0; j < got.size(); ++j)
            CHECK(std::abs(got[j] - want[j]) < 1e-9);
    }
}

TEST_CASE("weights file round trip") {
    std::mt19937 rng(5);
    NetworkModel net = random_net(rng, 3, {4}, 2);
    std::ostringstream out;
    net.save(out);
    std::string path = "test_weights_rt.txt";
    {
        std::ofstream f(path);
        f << out.str();
    }
    NetworkModel loaded = NetworkModel::load(path);
    std::uniform_real_distribution<double> val(-1, 1);
    for (int i = 0; i < 20; ++i) {
        Vector x(3);
        for (double& v : x) v = val(rng);
        CHECK(net.logits(x) == loaded.logits(x));
    }
    std::remove(path.c_str());
}
