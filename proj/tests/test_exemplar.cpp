#include <cmath>
#include <cstddef>
#include <vector>

#include "doctest.h"

#include "codl/errors.hpp"
#include "codl/exemplar.hpp"
#include "codl/rng.hpp"
#include "oracles.hpp"

using codl::GridShape;
using codl::TransformKind;
using codl::TransformSpec;
using codl::Vec;

namespace {

// Identity trunk: features(x) == x, so selection geometry is transparent.
codl::EmbedderParams identity_params(std::size_t dim) {
    codl::EmbedderConfig c;
    c.input_dim = dim;
    c.hidden_dims = {};
    c.feature_dim = dim;
    c.seed = 0;
    codl::EmbedderParams p = codl::init_embedder(c);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t col = 0; col < dim; ++col)
            p.trunk[0].w.data[r * dim + col] = r == col ? 1.0 : 0.0;
    return p;
}

std::vector<Vec> random_inputs(std::size_t n, std::size_t dim,
                               std::uint64_t seed) {
    codl::Rng rng(seed);
    std::vector<Vec> out(n, Vec(dim));
    for (auto& v : out)
        for (double& x : v) x = rng.uniform(-3.0, 3.0);
    return out;
}

}  // namespace

TEST_CASE("select_exemplars m=1 picks the feature nearest the class mean") {
    const auto params = identity_params(2);
    const std::vector<Vec> inputs = {{4.0, 0.0}, {1.0, 1.0}, {0.0, 4.0},
                                     {1.5, 1.2}};
    // mean = (1.625, 1.3); brute scan:
    std::size_t want = 0;
    double best = 1e300;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const double dx = inputs[i][0] - 1.625;
        const double dy = inputs[i][1] - 1.3;
        if (dx * dx + dy * dy < best) {
            best = dx * dx + dy * dy;
            want = i;
        }
    }
    const codl::ExemplarSet set = codl::select_exemplars(inputs, params, 1);
    REQUIRE(set.items.size() == 1);
    CHECK(set.provenance[0] == want);
}

TEST_CASE("identical inputs select indices 0..m-1 by the tie rule") {
    const auto params = identity_params(3);
    const std::vector<Vec> inputs(6, Vec{1.0, 2.0, 3.0});
    const codl::ExemplarSet set = codl::select_exemplars(inputs, params, 4);
    CHECK(set.provenance == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("every herding step matches the exhaustive per-step oracle") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        codl::Rng rng(900 + seed);
        const std::size_t n = 20 + rng.index(41);
        const std::size_t dim = 2 + rng.index(5);
        const auto params = identity_params(dim);
        const auto inputs = random_inputs(n, dim, 41 + seed);
        const std::size_t m = 1 + rng.index(n);
        const codl::ExemplarSet set = codl::select_exemplars(inputs, params, m);
        const std::vector<std::size_t> want =
            oracle::brute_force_herding(inputs, m);
        CHECK(set.provenance == want);
    }
}

TEST_CASE("selection order is independent of m (prefix property)") {
    const auto params = identity_params(4);
    const auto inputs = random_inputs(40, 4, 1234);
    const codl::ExemplarSet small = codl::select_exemplars(inputs, params, 5);
    const codl::ExemplarSet big = codl::select_exemplars(inputs, params, 20);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(small.provenance[i] == big.provenance[i]);
    // reduce() recovers the same prefix.
    const codl::ExemplarSet cut = codl::reduce(big, 5);
    CHECK(cut.provenance == small.provenance);
    CHECK(cut.items == small.items);
}

TEST_CASE("select_exemplars validates its range") {
    const auto params = identity_params(2);
    const auto inputs = random_inputs(5, 2, 9);
    CHECK_THROWS_AS(codl::select_exemplars({}, params, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(codl::select_exemplars(inputs, params, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(codl::select_exemplars(inputs, params, 6),
                    std::invalid_argument);
}

TEST_CASE("provenance never repeats a source index") {
    const auto params = identity_params(3);
    const auto inputs = random_inputs(30, 3, 77);
    const codl::ExemplarSet set = codl::select_exemplars(inputs, params, 30);
    std::vector<bool> seen(30, false);
    for (std::size_t idx : set.provenance) {
        CHECK_FALSE(seen[idx]);
        seen[idx] = true;
    }
}

TEST_CASE("reduce keeps the leading prefix") {
    codl::ExemplarSet set;
    set.concept_id = 3;
    for (int i = 0; i < 5; ++i) {
        set.items.push_back({double(i)});
        set.provenance.push_back(static_cast<std::size_t>(i));
    }
    CHECK(codl::reduce(set, 5).items == set.items);
    CHECK(codl::reduce(set, 0).items.empty());
    const codl::ExemplarSet two = codl::reduce(set, 2);
    CHECK(two.items == std::vector<Vec>{{0.0}, {1.0}});
    CHECK(two.concept_id == 3);
    CHECK_THROWS_AS(codl::reduce(set, 6), std::invalid_argument);
}

TEST_CASE("magnitude zero reproduces the input for every transform kind") {
    const Vec x = {0.1, 0.5, 0.9, 0.2, 0.7, 0.3, 0.8, 0.4, 0.6};
    const GridShape grid{3, 3, 1};
    std::vector<TransformSpec> specs;
    for (TransformKind kind :
         {TransformKind::jitter, TransformKind::scale, TransformKind::translate,
          TransformKind::rotate90, TransformKind::contrast,
          TransformKind::colorshift}) {
        TransformSpec s;
        s.kind = kind;
        s.magnitude = 0.0;
        s.seed = 5;
        s.grid = grid;
        specs.push_back(s);
    }
    const std::vector<Vec> out = codl::augment(x, specs);
    REQUIRE(out.size() == specs.size());
    for (const Vec& y : out) CHECK(y == x);
}

TEST_CASE("four quarter turns restore the grid") {
    const GridShape grid{3, 3, 2};
    codl::Rng rng(21);
    Vec x(grid.flat_size());
    for (double& v : x) v = rng.next_unit();
    TransformSpec turn;
    turn.kind = TransformKind::rotate90;
    turn.magnitude = 1.0;
    turn.grid = grid;
    Vec cur = x;
    for (int i = 0; i < 4; ++i) cur = codl::augment(cur, {turn})[0];
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(cur[i] == doctest::Approx(x[i]).epsilon(1e-15));
    // One turn of a non-square grid cannot preserve the shape.
    TransformSpec bad = turn;
    bad.grid = GridShape{2, 3, 1};
    CHECK_THROWS_AS(codl::augment(Vec(6, 0.0), {bad}), std::invalid_argument);
}

TEST_CASE("translate shifts the grid right with a zero fill column") {
    // 3x3 single channel: rows are (1,2,3), (4,5,6), (7,8,9).
    const Vec x = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    TransformSpec s;
    s.kind = TransformKind::translate;
    s.magnitude = 1.0;
    s.grid = GridShape{3, 3, 1};
    const Vec got = codl::augment(x, {s})[0];
    const Vec want = {0, 1, 2, 0, 4, 5, 0, 7, 8};
    CHECK(got == want);
}

TEST_CASE("scale and contrast follow their closed forms") {
    const Vec x = {1.0, 2.0, 3.0, 6.0};
    TransformSpec sc;
    sc.kind = TransformKind::scale;
    sc.magnitude = 0.5;
    CHECK(codl::augment(x, {sc})[0] == Vec{1.5, 3.0, 4.5, 9.0});

    TransformSpec ct;
    ct.kind = TransformKind::contrast;
    ct.magnitude = 1.0;  // v -> mean + 2(v - mean), mean = 3
    const Vec got = codl::augment(x, {ct})[0];
    const Vec want = {-1.0, 1.0, 3.0, 9.0};
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("jitter is bounded by magnitude and seed-deterministic") {
    const Vec x = random_inputs(1, 16, 5)[0];
    TransformSpec s;
    s.kind = TransformKind::jitter;
    s.magnitude = 0.25;
    s.seed = 99;
    const Vec a = codl::augment(x, {s})[0];
    const Vec b = codl::augment(x, {s})[0];
    CHECK(a == b);
    bool moved = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(std::fabs(a[i] - x[i]) <= 0.25);
        if (a[i] != x[i]) moved = true;
    }
    CHECK(moved);
    s.seed = 100;
    CHECK(codl::augment(x, {s})[0] != a);
}

TEST_CASE("colorshift adds magnitude to exactly one channel") {
    const GridShape grid{2, 2, 3};
    Vec x(grid.flat_size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = double(i);
    TransformSpec s;
    s.kind = TransformKind::colorshift;
    s.magnitude = 0.5;
    s.seed = 7;  // 7 % 3 = channel 1
    s.grid = grid;
    const Vec got = codl::augment(x, {s})[0];
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i % 3 == 1)
            CHECK(got[i] == doctest::Approx(x[i] + 0.5));
        else
            CHECK(got[i] == x[i]);
    }
}

TEST_CASE("grid kinds reject missing or mismatched grid metadata") {
    TransformSpec s;
    s.kind = TransformKind::translate;
    s.magnitude = 1.0;
    CHECK_THROWS_AS(codl::augment(Vec(4, 0.0), {s}), std::invalid_argument);
    s.grid = GridShape{2, 2, 1};
    CHECK_THROWS_AS(codl::augment(Vec(5, 0.0), {s}), std::invalid_argument);
    CHECK_THROWS_AS(codl::transform_kind_from_string("warp"),
                    codl::parse_error);
}

TEST_CASE("exemplar_mean averages features in storage order") {
    const auto params = identity_params(2);
    codl::ExemplarSet set;
    set.items = {{2.0, 4.0}};
    CHECK(codl::exemplar_mean(set, params) == Vec{2.0, 4.0});

    set.items = {{1.0, -2.0}, {-1.0, 2.0}};  // f and -f cancel
    const Vec zero = codl::exemplar_mean(set, params);
    CHECK(zero[0] == 0.0);
    CHECK(zero[1] == 0.0);

    set.items = random_inputs(9, 2, 3);
    const Vec got = codl::exemplar_mean(set, params);
    Vec want(2, 0.0);
    for (const Vec& item : set.items)
        for (std::size_t d = 0; d < 2; ++d) want[d] += item[d];
    for (double& v : want) v /= 9.0;
    for (std::size_t d = 0; d < 2; ++d)
        CHECK(got[d] == doctest::Approx(want[d]).epsilon(1e-12));

    set.items.clear();
    CHECK_THROWS_AS(codl::exemplar_mean(set, params), std::invalid_argument);
}
