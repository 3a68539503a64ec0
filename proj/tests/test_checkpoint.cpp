#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

#include <gtest/gtest.h>

#include "spinrl/checkpoint.hpp"
#include "spinrl/rng.hpp"

#include "support.hpp"

using namespace spinrl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("spinrl_ck_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

Checkpoint make_checkpoint(std::uint64_t seed) {
    Rng rng(seed);
    Checkpoint ck;
    ck.params = ActorCritic(5, 3, {8, 6});
    ck.params.init(rng);
    ck.params.log_std[0] = -0.25;
    ck.hp.learning_rate = 3.5e-4;
    ck.hp.epochs = 7;
    ck.hp.seed = seed;
    Rng trainer_rng(seed + 1), env_rng(seed + 2);
    trainer_rng.normal();
    env_rng.uniform();
    ck.trainer_rng = trainer_rng.serialize();
    ck.env_rng = env_rng.serialize();
    ck.episodes_done = 123;
    ck.updates_done = 9;
    return ck;
}

}  // namespace

TEST(Checkpoint, SaveLoadRoundTripIsExact) {
    TempDir dir;
    const Checkpoint ck = make_checkpoint(41);
    const std::string path = dir.file("a.ckpt");
    save_checkpoint(ck, path);
    const Checkpoint back = load_checkpoint(path);

    EXPECT_EQ(back.params.actor.layer_sizes(), ck.params.actor.layer_sizes());
    EXPECT_EQ(back.params.critic.layer_sizes(), ck.params.critic.layer_sizes());
    const Eigen::VectorXd a = ck.params.flatten(), b = back.params.flatten();
    ASSERT_EQ(a.size(), b.size());
    EXPECT_EQ(std::memcmp(a.data(), b.data(), sizeof(double) * a.size()), 0);

    EXPECT_EQ(back.trainer_rng, ck.trainer_rng);
    EXPECT_EQ(back.env_rng, ck.env_rng);
    EXPECT_EQ(back.episodes_done, ck.episodes_done);
    EXPECT_EQ(back.updates_done, ck.updates_done);
    EXPECT_EQ(back.hp.learning_rate, ck.hp.learning_rate);
    EXPECT_EQ(back.hp.epochs, ck.hp.epochs);
    EXPECT_EQ(back.hp.seed, ck.hp.seed);
    EXPECT_EQ(back.hp.gamma, ck.hp.gamma);
    EXPECT_EQ(back.hp.minibatch_size, ck.hp.minibatch_size);
}

TEST(Checkpoint, SavedFileIsByteStable) {
    TempDir dir;
    const Checkpoint ck = make_checkpoint(42);
    save_checkpoint(ck, dir.file("x.ckpt"));
    save_checkpoint(ck, dir.file("y.ckpt"));
    std::ifstream fx(dir.file("x.ckpt"), std::ios::binary);
    std::ifstream fy(dir.file("y.ckpt"), std::ios::binary);
    const std::string sx((std::istreambuf_iterator<char>(fx)), {});
    const std::string sy((std::istreambuf_iterator<char>(fy)), {});
    ASSERT_FALSE(sx.empty());
    EXPECT_EQ(sx, sy);
}

TEST(Checkpoint, BadMagicRejected) {
    TempDir dir;
    const std::string path = dir.file("bad.ckpt");
    save_checkpoint(make_checkpoint(43), path);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("NOTMINE!", 8);
    }
    EXPECT_THROW(load_checkpoint(path), IncompatibleCheckpoint);
}

TEST(Checkpoint, BadVersionRejected) {
    TempDir dir;
    const std::string path = dir.file("ver.ckpt");
    save_checkpoint(make_checkpoint(44), path);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(8);
        const std::uint32_t v = 999;
        f.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
    EXPECT_THROW(load_checkpoint(path), IncompatibleCheckpoint);
}

TEST(Checkpoint, TruncatedFileRejected) {
    TempDir dir;
    const std::string path = dir.file("full.ckpt");
    save_checkpoint(make_checkpoint(45), path);
    const auto full_size = fs::file_size(path);
    // chop at several depths: inside params, inside header, inside the prefix
    for (const auto frac : {0.9, 0.5, 0.1}) {
        const std::string cut = dir.file("cut.ckpt");
        std::ifstream in(path, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), {});
        bytes.resize(static_cast<size_t>(static_cast<double>(full_size) * frac));
        std::ofstream out(cut, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        EXPECT_THROW(load_checkpoint(cut), IncompatibleCheckpoint) << "frac " << frac;
    }
}

TEST(Checkpoint, MissingFileRejected) {
    EXPECT_THROW(load_checkpoint("/nonexistent/nowhere.ckpt"), IncompatibleCheckpoint);
}

TEST(Checkpoint, GarbageHeaderRejected) {
    TempDir dir;
    const std::string path = dir.file("garbage.ckpt");
    std::ofstream out(path, std::ios::binary);
    out.write(Checkpoint::kMagic, 8);
    const std::uint32_t ver = Checkpoint::kVersion;
    out.write(reinterpret_cast<const char*>(&ver), sizeof(ver));
    const std::string junk = "this is not json";
    const std::uint64_t hlen = junk.size();
    out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
    out.write(junk.data(), static_cast<std::streamsize>(junk.size()));
    out.close();
    EXPECT_THROW(load_checkpoint(path), IncompatibleCheckpoint);
}

TEST(Rng, SerializeRoundTripResumesStream) {
    Rng a(99);
    for (int i = 0; i < 57; ++i) a.normal();
    const std::string state = a.serialize();
    Rng b;
    b.deserialize(state);
    for (int i = 0; i < 100; ++i) {
        ASSERT_EQ(a.normal(), b.normal());
        ASSERT_EQ(a.uniform(), b.uniform());
    }
}

TEST(Rng, SameSeedSameStream) {
    Rng a(7), b(7), c(8);
    bool any_diff = false;
    for (int i = 0; i < 50; ++i) {
        const double va = a.uniform();
        ASSERT_EQ(va, b.uniform());
        if (va != c.uniform()) any_diff = true;
    }
    EXPECT_TRUE(any_diff);
}
