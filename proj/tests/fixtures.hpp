#pragma once

// Shared test networks.  LINE3 is the balanced three-node line; the *_dec and
// *_inc variants put a steep market-size gradient between the two non-shock
// markets.  The star networks place the gradient against the shock node's
// mean so that the pooling region sits strictly inside the support.

#include <cstdint>
#include <random>
#include <vector>

#include "infodesign/network.hpp"
#include "infodesign/prior.hpp"

namespace fixtures {

using infodesign::Network;
using infodesign::Prior;

inline Network line3() {
    Network n;
    n.mass = {2, 2, 2};
    n.beta = {1, 1, 1};
    n.market_size = {0, 2, 2};
    n.edges = {{0, 1, 1.0}, {1, 2, 1.0}};
    n.commission = 0.5;
    return n;
}
inline Prior line3_prior() { return Prior::uniform(-2, 6); }

inline Network line3_dec() {
    Network n;
    n.mass = {4, 8, 2};
    n.beta = {1, 1, 1};
    n.market_size = {0, 8, 2};
    n.edges = {{0, 1, 1.0}, {1, 2, 1.0}};
    n.commission = 0.5;
    return n;
}
inline Prior line3_dec_prior() { return Prior::uniform(-2, 10); }

inline Network line3_inc() {
    Network n;
    n.mass = {4, 2, 8};
    n.beta = {1, 1, 1};
    n.market_size = {0, 2, 8};
    n.edges = {{0, 1, 1.0}, {1, 2, 1.0}};
    n.commission = 0.5;
    return n;
}
inline Prior line3_inc_prior() { return Prior::uniform(-2, 10); }

// Decreasing transition relative to the shock node itself: one interior
// concave kink on the positive side, pool reaches the top of the support.
inline Network star_dec() {
    Network n;
    n.mass = {16, 5.9, 1.5};
    n.beta = {0.25, 1, 1};
    n.market_size = {0, 5.9, 1.5};
    n.edges = {{0, 1, 1.0}, {0, 2, 1.5}};
    n.commission = 0.5;
    return n;
}
inline Prior star_dec_prior() { return Prior::uniform(0.5, 7.5); }

// Increasing transition: the concave kink lands on the negative side and the
// pool reaches the bottom of the support.
inline Network star_inc() {
    Network n;
    n.mass = {16, 5.9, 7.5};
    n.beta = {0.25, 1, 1};
    n.market_size = {0, 5.9, 7.5};
    n.edges = {{0, 1, 1.0}, {0, 2, 1.5}};
    n.commission = 0.5;
    return n;
}
inline Prior star_inc_prior() { return Prior::uniform(0.5, 7.5); }

inline Network two_node() {
    Network n;
    n.mass = {1, 1};
    n.beta = {1, 1};
    n.market_size = {0, 1};
    n.edges = {{0, 1, 1.0}};
    n.commission = 0.5;
    return n;
}
inline Prior two_node_prior() { return Prior::uniform(-6, 6); }

// Random connected network; with balanced=true the market sizes satisfy the
// initial-balance condition by construction (prices pi_i with pairwise gaps
// below the cheapest edge).
struct RandomNet {
    Network net;
    double mean_state;  // prior mean that balances node 0
};

inline RandomNet random_network(std::mt19937_64& rng, int max_nodes = 8, bool balanced = true) {
    std::uniform_int_distribution<int> nd(2, max_nodes);
    std::uniform_real_distribution<double> cost(0.4, 3.0), massd(0.5, 5.0), betad(0.3, 3.0),
        pi(-0.1, 0.1), rd(0.2, 0.8), attach(0.0, 1.0);
    int n = nd(rng);
    Network net;
    net.mass.resize(n);
    net.beta.resize(n);
    net.market_size.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        net.mass[i] = massd(rng);
        net.beta[i] = betad(rng);
    }
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> parent(0, i - 1);
        net.edges.push_back({parent(rng), i, cost(rng)});
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (attach(rng) < 0.25) net.edges.push_back({i, j, cost(rng)});
    net.commission = rd(rng);

    double mean = net.beta[0] * net.mass[0];
    for (int i = 1; i < n; ++i) {
        double price = balanced ? 0.12 * pi(rng) : pi(rng) * 8;
        net.market_size[i] = std::max(0.0, net.beta[i] * net.mass[i] + price / (1 - net.commission));
    }
    return {net, mean};
}

}  // namespace fixtures
