#include <gtest/gtest.h>

#include "qmpc/errors.hpp"
#include "qmpc/mpc.hpp"

using namespace qmpc;

namespace {

MpcCall echo(std::vector<uint64_t> inputs) {
  return {"echo", [inputs](const MpcMemory&, Rng&) {
            MpcResult r;
            for (uint64_t x : inputs) r.outputs.emplace_back(x);
            r.update = [](MpcMemory& m) { m.put("echoed", true); };
            return r;
          }};
}

}  // namespace

TEST(MPCState, honest_echo_delivers_inputs) {
  Rng rng(1);
  MPCState mpc(3, {});
  MpcOutcome out = mpc.invoke(echo({7, 8, 9}), rng);
  ASSERT_FALSE(out.aborted);
  EXPECT_EQ(std::get<uint64_t>(out.to(1)), 7u);
  EXPECT_EQ(std::get<uint64_t>(out.to(3)), 9u);
  EXPECT_TRUE(mpc.memory().contains("echoed"));
  EXPECT_EQ(mpc.calls(), 1u);
}

TEST(MPCState, corrupted_abort_bit_blocks_honest_output_and_update) {
  Rng rng(2);
  MPCState mpc(3, {2});
  std::vector<PlayerId> saw;
  auto policy = [&](PlayerId p, const std::string&, const MpcValue& v) {
    saw.push_back(p);
    EXPECT_EQ(std::get<uint64_t>(v), 8u);
    return true;
  };
  MpcOutcome out = mpc.invoke(echo({7, 8, 9}), rng, policy);
  EXPECT_TRUE(out.aborted);
  EXPECT_TRUE(out.outputs.empty());
  EXPECT_EQ(saw, std::vector<PlayerId>{2});
  EXPECT_FALSE(mpc.memory().contains("echoed"));
  EXPECT_TRUE(mpc.aborted());
  EXPECT_EQ(mpc.abort_blame(), 2);
  // Once aborted, every later call aborts without running.
  EXPECT_TRUE(mpc.invoke(echo({1, 2, 3}), rng).aborted);
  ASSERT_EQ(mpc.log().size(), 2u);
  EXPECT_TRUE(mpc.log()[0].abort_bits[0].second);
}

TEST(MPCState, memory_persists_between_calls) {
  Rng rng(3);
  MPCState mpc(2, {});
  MpcCall sample{"sample", [](const MpcMemory&, Rng& r) {
                   CliffordOp key = random_clifford(3, r);
                   MpcResult res;
                   res.outputs.resize(2);
                   res.update = [key](MpcMemory& m) { m.put("k", key); };
                   return res;
                 }};
  mpc.invoke(sample, rng);
  MpcCall read{"read", [](const MpcMemory& m, Rng&) {
                 MpcResult res;
                 res.outputs = {m.get("k"), std::monostate{}};
                 return res;
               }};
  MpcOutcome out = mpc.invoke(read, rng);
  EXPECT_EQ(std::get<CliffordOp>(out.to(1)), std::get<CliffordOp>(mpc.memory().get("k")));
}

TEST(MPCState, key_registry) {
  Rng rng(4);
  MPCState mpc(2, {1});
  CliffordOp key = random_clifford(3, rng);
  mpc.store_key(5, key);
  EXPECT_EQ(mpc.read_key(5), key);
  EXPECT_TRUE(mpc.has_key(5));
  mpc.erase_key(5);
  EXPECT_THROW(mpc.read_key(5), KeyErased);
  EXPECT_FALSE(mpc.has_key(5));
  mpc.store_bot(6);
  EXPECT_TRUE(mpc.is_bot(6));
  EXPECT_THROW(mpc.read_key(6), KeyErased);
  EXPECT_THROW(mpc.read_key(7), KeyErased);
  mpc.store_key(8, key);
  EXPECT_EQ(mpc.release_key(8), key);
  EXPECT_THROW(mpc.release_key(8), KeyErased);
}

TEST(MPCState, bits_and_validation) {
  MPCState mpc(3, {1, 2});
  mpc.store_bit("m0", true);
  EXPECT_EQ(mpc.read_bit("m0"), true);
  EXPECT_FALSE(mpc.read_bit("m1").has_value());
  EXPECT_THROW(MPCState(2, {1, 2}), ConfigError);
  EXPECT_THROW(MPCState(1, {}), ConfigError);
  EXPECT_THROW(MPCState(3, {4}), ConfigError);
}

TEST(MPCState, sessions_are_isolated) {
  Rng rng(5);
  MPCState a(2, {}, 1), b(2, {}, 2);
  a.store_key(0, random_clifford(2, rng));
  EXPECT_FALSE(b.has_key(0));
}
