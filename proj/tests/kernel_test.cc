#include "cbq/kernel.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

using namespace cbq;
using namespace cbq::gates;

namespace {

std::vector<Complex> random_state(std::mt19937_64& rng, std::size_t size) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<Complex> v(size);
    for (Complex& a : v) {
        a = Complex(dist(rng), dist(rng));
    }
    return v;
}

double norm2(const std::vector<Complex>& v) {
    double sum = 0.0;
    for (const Complex& a : v) {
        sum += std::norm(a);
    }
    return std::sqrt(sum);
}

TEST(AssembleSplit, SingleBlockIsIdentity) {
    SVGroup group{0, {0}};
    const SVBlock a = {Complex(1), Complex(2), Complex(3), Complex(4)};
    const GroupBuffer buf = assemble_group_buffer(group, {a});
    EXPECT_EQ(buf.amps, a);
}

TEST(AssembleSplit, ConcatenatesAndRoundTrips) {
    SVGroup group{0, {0, 1}};
    const SVBlock x = {Complex(1), Complex(2)};
    const SVBlock y = {Complex(3), Complex(4)};
    const GroupBuffer buf = assemble_group_buffer(group, {x, y});
    EXPECT_EQ(buf.amps, (std::vector<Complex>{Complex(1), Complex(2), Complex(3), Complex(4)}));
    const auto blocks = split_buffer(buf, 1);
    ASSERT_EQ(blocks.size(), 2u);
    EXPECT_EQ(blocks[0], x);
    EXPECT_EQ(blocks[1], y);
}

TEST(AssembleSplit, RejectsMismatchedBlocks) {
    SVGroup group{0, {0, 1}};
    EXPECT_THROW(assemble_group_buffer(group, {{Complex(1)}, {Complex(1), Complex(2)}}),
                 std::invalid_argument);
    SVGroup three{0, {0, 1, 2}};
    EXPECT_THROW(assemble_group_buffer(three, {{}, {}, {}}), std::invalid_argument);
}

TEST(ApplyGate, HadamardOnBasisState) {
    GroupBuffer buf{SVGroup{}, {Complex(1), Complex(0)}};
    apply_gate(buf, unitary2(h(0)), 0);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(buf.amps[0].real(), inv_sqrt2, 1e-15);
    EXPECT_NEAR(buf.amps[1].real(), inv_sqrt2, 1e-15);
}

TEST(ApplyGate, CnotTruthTable) {
    // |01> with control bit 0 set flips target bit 1: 0b01 -> 0b11
    GroupBuffer buf{SVGroup{}, {Complex(0), Complex(1), Complex(0), Complex(0)}};
    apply_gate(buf, unitary4(cx(0, 1)), 0, 1);
    EXPECT_EQ(buf.amps[1], Complex(0));
    EXPECT_EQ(buf.amps[3], Complex(1));
}

TEST(ApplyGate, XGateMatchesBruteForcePermutation) {
    std::mt19937_64 rng(7);
    GroupBuffer buf{SVGroup{}, random_state(rng, 8)};
    std::vector<Complex> expected(8);
    for (std::uint64_t i = 0; i < 8; ++i) {
        expected[i ^ 2ull] = buf.amps[i];    // X on bit 1 swaps indices differing in bit 1
    }
    apply_gate(buf, unitary2(x(0)), 1);
    EXPECT_EQ(buf.amps, expected);
}

TEST(ApplyGate, MatchesNaiveOracleOnRandomStates) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 60; ++trial) {
        const std::uint32_t n = 2 + static_cast<std::uint32_t>(rng() % 5);
        std::vector<Complex> state = random_state(rng, 1ull << n);
        const Gate g = test::random_gate(rng, n);
        const std::vector<Complex> expected = test::naive_apply(state, g);

        GroupBuffer buf{SVGroup{}, state};
        if (is_two_qubit(g.kind)) {
            apply_gate(buf, unitary4(g), g.q0, g.q1);
        } else {
            apply_gate(buf, unitary2(g), g.q0);
        }
        EXPECT_LE(test::max_deviation(buf.amps, expected), 1e-12) << gate_name(g.kind);
    }
}

TEST(ApplyGate, Linearity) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Gate g = test::random_gate(rng, 3);
        const std::vector<Complex> xs = random_state(rng, 8);
        const std::vector<Complex> ys = random_state(rng, 8);
        const Complex alpha(dist(rng), dist(rng)), beta(dist(rng), dist(rng));

        GroupBuffer combined{SVGroup{}, std::vector<Complex>(8)};
        for (int i = 0; i < 8; ++i) {
            combined.amps[i] = alpha * xs[i] + beta * ys[i];
        }
        GroupBuffer gx{SVGroup{}, xs}, gy{SVGroup{}, ys};
        const auto apply = [&](GroupBuffer& b) {
            if (is_two_qubit(g.kind)) {
                apply_gate(b, unitary4(g), g.q0, g.q1);
            } else {
                apply_gate(b, unitary2(g), g.q0);
            }
        };
        apply(combined);
        apply(gx);
        apply(gy);
        for (int i = 0; i < 8; ++i) {
            EXPECT_LE(std::abs(combined.amps[i] - (alpha * gx.amps[i] + beta * gy.amps[i])),
                      1e-12);
        }
    }
}

TEST(ApplyGate, RejectsOutOfRangeBits) {
    GroupBuffer buf{SVGroup{}, {Complex(1), Complex(0)}};
    EXPECT_THROW(apply_gate(buf, unitary2(h(0)), 1), std::invalid_argument);
    GroupBuffer buf4{SVGroup{}, std::vector<Complex>(4)};
    EXPECT_THROW(apply_gate(buf4, unitary4(cx(0, 1)), 1, 1), std::invalid_argument);
}

TEST(ApplyStage, EmptyStageLeavesBufferUnchanged) {
    const Circuit c(2);
    const Layout layout = make_layout(2, 1);
    const Stage stage{0, 0, {}};
    GroupBuffer buf{SVGroup{0, {0}}, {Complex(0.5), Complex(0.5)}};
    const auto before = buf.amps;
    apply_stage(buf, stage, c, layout);
    EXPECT_EQ(buf.amps, before);
}

TEST(ApplyStage, DoubleHadamardIsIdentity) {
    Circuit c(2);
    c.add(h(0));
    c.add(h(0));
    const Layout layout = make_layout(2, 2);
    const Stage stage{0, 2, {}};
    std::mt19937_64 rng(9);
    GroupBuffer buf{SVGroup{0, {0}}, random_state(rng, 4)};
    const auto before = buf.amps;
    apply_stage(buf, stage, c, layout);
    EXPECT_LE(test::max_deviation(buf.amps, before), 1e-15);
}

TEST(ApplyStage, PreservesNorm) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        Circuit c = test::random_circuit(rng, 4, 12);
        const Layout layout = make_layout(4, 4);
        const Stage stage{0, c.gates.size(), {}};
        GroupBuffer buf{SVGroup{0, {0}}, random_state(rng, 16)};
        const double before = norm2(buf.amps);
        apply_stage(buf, stage, c, layout);
        EXPECT_NEAR(norm2(buf.amps) / before, 1.0, 1e-12);
    }
}

TEST(ApplyStage, RemapsInnerQubits) {
    // One inner qubit: gate on qubit 2 must act on buffer bit 1 (b=1, rank 0).
    Circuit c(3);
    c.add(x(2));
    const Layout layout = make_layout(3, 1);
    const Stage stage{0, 1, {2}};
    // group of blocks {id with bit1=0, id with bit1=1} at outer bit fixed:
    // buffer = [block g2=0; block g2=1], buffer bit 1 toggles the block half.
    GroupBuffer buf{SVGroup{0, {0, 2}},
                    {Complex(1), Complex(2), Complex(3), Complex(4)}};
    apply_stage(buf, stage, c, layout);
    EXPECT_EQ(buf.amps,
              (std::vector<Complex>{Complex(3), Complex(4), Complex(1), Complex(2)}));
}

} // namespace
