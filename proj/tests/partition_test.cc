#include "cbq/partition.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "cbq/kernel.hpp"
#include "test_util.hpp"

using namespace cbq;
using namespace cbq::gates;

namespace {

TEST(Layout, Validation) {
    const Layout l = make_layout(6, 2);
    EXPECT_EQ(l.c, 4u);
    EXPECT_EQ(l.num_blocks(), 16u);
    EXPECT_EQ(l.block_size(), 4u);
    EXPECT_THROW(make_layout(4, 0), std::invalid_argument);
    EXPECT_THROW(make_layout(4, 5), std::invalid_argument);
    EXPECT_NO_THROW(make_layout(4, 4));
}

TEST(Partition, AllLocalOperandsGiveOneStage) {
    Circuit c(4);
    c.add(h(0));
    c.add(cx(0, 1));
    c.add(h(1));
    const PartitionPlan plan = partition_circuit(c, 2, 1);
    ASSERT_EQ(plan.stages.size(), 1u);
    EXPECT_EQ(plan.stages[0].gate_begin, 0u);
    EXPECT_EQ(plan.stages[0].gate_end, 3u);
    EXPECT_TRUE(plan.stages[0].inner.empty());
}

TEST(Partition, ThresholdClampsToTwo) {
    // inner_size=1 clamps to threshold 2, so H(2) and H(3) share one stage.
    Circuit c(4);
    c.add(h(2));
    c.add(h(3));
    const PartitionPlan plan = partition_circuit(c, 2, 1);
    ASSERT_EQ(plan.stages.size(), 1u);
    EXPECT_EQ(plan.stages[0].inner, (std::vector<std::uint32_t>{2, 3}));
}

TEST(Partition, GlobalSetWithinBudgetStaysOneStage) {
    Circuit c(4);
    c.add(h(2));
    c.add(h(3));
    c.add(cx(2, 3));
    c.add(h(2));
    const PartitionPlan plan = partition_circuit(c, 2, 2);
    ASSERT_EQ(plan.stages.size(), 1u);
    EXPECT_EQ(plan.stages[0].inner, (std::vector<std::uint32_t>{2, 3}));
}

TEST(Partition, BreaksWhenBudgetExceeded) {
    Circuit c(6);
    c.add(h(2));    // globals {2}
    c.add(h(3));    // {2,3}
    c.add(h(4));    // {2,3,4} exceeds threshold 2 -> new stage
    c.add(h(5));    // {4,5} exceeds -> new stage
    const PartitionPlan plan = partition_circuit(c, 2, 2);
    ASSERT_EQ(plan.stages.size(), 3u);
    EXPECT_EQ(plan.stages[0].inner, (std::vector<std::uint32_t>{2, 3}));
    EXPECT_EQ(plan.stages[1].inner, (std::vector<std::uint32_t>{4}));
    EXPECT_EQ(plan.stages[2].inner, (std::vector<std::uint32_t>{5}));
}

TEST(Partition, EmptyCircuitHasNoStages) {
    const Circuit c(4);
    EXPECT_TRUE(partition_circuit(c, 2, 2).stages.empty());
}

TEST(Partition, StagesCoverCircuitInOrder) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::uint32_t n = 3 + static_cast<std::uint32_t>(rng() % 8);
        const std::uint32_t b = 1 + static_cast<std::uint32_t>(rng() % n);
        const std::uint32_t inner_size = static_cast<std::uint32_t>(rng() % 4);
        const Circuit c = test::random_circuit(rng, n, 1 + rng() % 60);
        const PartitionPlan plan = partition_circuit(c, b, inner_size);

        const std::uint32_t threshold = std::max(inner_size, 2u);
        std::size_t expected_begin = 0;
        for (const Stage& st : plan.stages) {
            EXPECT_EQ(st.gate_begin, expected_begin);
            EXPECT_LT(st.gate_begin, st.gate_end);
            expected_begin = st.gate_end;
            EXPECT_LE(st.inner.size(), threshold);
            EXPECT_LE(st.inner.size(), plan.layout.c);
            EXPECT_TRUE(std::is_sorted(st.inner.begin(), st.inner.end()));
            // every gate operand is local or a member of inner
            for (std::size_t i = st.gate_begin; i < st.gate_end; ++i) {
                const Gate& g = c.gates[i];
                for (const std::uint32_t q :
                     {g.q0, is_two_qubit(g.kind) ? g.q1 : g.q0}) {
                    if (q >= b) {
                        EXPECT_TRUE(
                            std::binary_search(st.inner.begin(), st.inner.end(), q));
                    }
                }
            }
        }
        EXPECT_EQ(expected_begin, c.gates.size());
    }
}

TEST(Partition, StageCountMonotoneInInnerSize) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const std::uint32_t n = 4 + static_cast<std::uint32_t>(rng() % 7);
        const std::uint32_t b = 1 + static_cast<std::uint32_t>(rng() % (n - 1));
        const Circuit c = test::random_circuit(rng, n, 40);
        std::size_t prev = std::numeric_limits<std::size_t>::max();
        for (std::uint32_t inner_size = 0; inner_size <= n; ++inner_size) {
            const std::size_t count = partition_circuit(c, b, inner_size).stages.size();
            EXPECT_LE(count, prev) << "inner_size=" << inner_size;
            prev = count;
        }
    }
}

TEST(Groups, EmptyInnerMakesSingletonGroups) {
    const Layout layout = make_layout(6, 2);
    const Stage stage{0, 1, {}};
    const auto groups = enumerate_groups(stage, layout);
    ASSERT_EQ(groups.size(), 16u);
    for (std::uint64_t g = 0; g < groups.size(); ++g) {
        ASSERT_EQ(groups[g].block_ids.size(), 1u);
        EXPECT_EQ(groups[g].block_ids[0], g);
    }
}

TEST(Groups, InterleavesInnerAndOuterBits) {
    // n=6, b=2: global positions 2..5; inner {3,5} -> 4 groups of 4 blocks.
    const Layout layout = make_layout(6, 2);
    const Stage stage{0, 1, {3, 5}};
    const auto groups = enumerate_groups(stage, layout);
    ASSERT_EQ(groups.size(), 4u);
    EXPECT_EQ(groups[0].block_ids, (std::vector<std::uint64_t>{0, 2, 8, 10}));
}

TEST(Groups, PartitionTheBlockIdSpace) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const std::uint32_t n = 3 + static_cast<std::uint32_t>(rng() % 8);
        const std::uint32_t b = 1 + static_cast<std::uint32_t>(rng() % n);
        const Layout layout = make_layout(n, b);
        // random inner subset of the global positions
        std::vector<std::uint32_t> inner;
        for (std::uint32_t q = b; q < n; ++q) {
            if (rng() % 2) {
                inner.push_back(q);
            }
        }
        const Stage stage{0, 1, inner};
        const auto groups = enumerate_groups(stage, layout);
        ASSERT_EQ(groups.size(), 1ull << (layout.c - inner.size()));
        std::set<std::uint64_t> seen;
        for (const SVGroup& grp : groups) {
            ASSERT_EQ(grp.block_ids.size(), 1ull << inner.size());
            for (const std::uint64_t id : grp.block_ids) {
                EXPECT_LT(id, layout.num_blocks());
                EXPECT_TRUE(seen.insert(id).second) << "duplicate block id";
            }
        }
        EXPECT_EQ(seen.size(), layout.num_blocks());
    }
}

TEST(BufferBit, MapsLocalAndInnerQubits) {
    const Layout layout = make_layout(6, 2);
    const Stage stage{0, 1, {3, 5}};
    EXPECT_EQ(buffer_bit_of_qubit(stage, layout, 1), 1u);
    EXPECT_EQ(buffer_bit_of_qubit(stage, layout, 3), 2u);
    EXPECT_EQ(buffer_bit_of_qubit(stage, layout, 5), 3u);
    EXPECT_THROW(buffer_bit_of_qubit(stage, layout, 4), std::logic_error);
}

// Staged group execution without compression must match the naive dense
// simulation; this exercises partition, groups, buffer remap, and kernel
// together.
TEST(Partition, StagedExecutionMatchesNaiveSimulation) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const std::uint32_t n = 3 + static_cast<std::uint32_t>(rng() % 8);    // up to 10
        const std::uint32_t b = 1 + static_cast<std::uint32_t>(rng() % n);
        const std::uint32_t inner_size = static_cast<std::uint32_t>(rng() % (n + 1));
        const Circuit c = test::random_circuit(rng, n, 30);
        const PartitionPlan plan = partition_circuit(c, b, inner_size);
        const Layout& layout = plan.layout;

        // blocks held in memory, no store/codec involved
        std::vector<SVBlock> blocks(layout.num_blocks(),
                                    SVBlock(layout.block_size(), Complex(0.0)));
        blocks[0][0] = Complex(1.0);

        for (const Stage& stage : plan.stages) {
            for (const SVGroup& group : enumerate_groups(stage, layout)) {
                std::vector<SVBlock> gathered;
                for (const std::uint64_t id : group.block_ids) {
                    gathered.push_back(blocks[id]);
                }
                GroupBuffer buf = assemble_group_buffer(group, gathered);
                apply_stage(buf, stage, c, layout);
                const auto scattered = split_buffer(buf, layout.b);
                for (std::size_t j = 0; j < scattered.size(); ++j) {
                    blocks[group.block_ids[j]] = scattered[j];
                }
            }
        }

        std::vector<Complex> staged;
        for (const SVBlock& blk : blocks) {
            staged.insert(staged.end(), blk.begin(), blk.end());
        }
        const std::vector<Complex> expected = test::naive_simulate(c);
        EXPECT_LE(test::max_deviation(staged, expected), 1e-12)
            << "n=" << n << " b=" << b << " inner_size=" << inner_size;
    }
}

} // namespace
