#include "helpers.hpp"

#include <slimchain/footprint.hpp>
#include <slimchain/store.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <iterator>

using namespace slimchain;
using namespace testing_helpers;

namespace {

Bytes slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return Bytes(std::istreambuf_iterator<char>(in), {});
}

void spit(const std::filesystem::path& p, const Bytes& data)
{
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

std::string read_text(const std::filesystem::path& p)
{
    const Bytes b = slurp(p);
    return std::string(b.begin(), b.end());
}

void write_text(const std::filesystem::path& p, const std::string& s) { spit(p, Bytes(s.begin(), s.end())); }

StoreError::Kind read_error(const std::filesystem::path& dir, std::string* what = nullptr)
{
    try {
        read_store(dir);
    } catch (const StoreError& e) {
        if (what) *what = e.what();
        return e.kind();
    }
    ADD_FAILURE() << "store read succeeded";
    return StoreError::Kind::io;
}

std::string replace_line(std::string text, const std::string& key, const std::string& value)
{
    const auto pos = text.find(key + "=");
    const auto end = text.find('\n', pos);
    return text.replace(pos, end - pos, key + "=" + value);
}

std::uint64_t manifest_number(const std::string& text, const std::string& key)
{
    const auto pos = text.find(key + "=") + key.size() + 1;
    return std::stoull(text.substr(pos, text.find('\n', pos) - pos));
}

} // namespace

TEST(Store, EmptyChainRoundTrips)
{
    TempDir dir;
    Ledger empty;
    EXPECT_EQ(write_store(empty, dir.path()), 0u);
    EXPECT_EQ(read_store(dir.path()), empty);
    EXPECT_TRUE(integrity_check(dir.path()).ok());
    EXPECT_NE(read_text(dir / MANIFEST_FILE).find("tip_height=none"), std::string::npos);
}

TEST(Store, BodyBytesMatchFieldSum)
{
    const Built b = build(small_plan(3, 40));
    const Ledger l = full_ledger(b.blocks);
    std::uint64_t expected = 0;
    for (std::size_t h = 0; h < b.gen.raw_blocks.size(); ++h) {
        const std::uint64_t len = b.gen.raw_blocks[h].size();
        expected += 1 + canonical_width(h) + canonical_width(len) + len;
    }
    EXPECT_EQ(l.body_bytes(), expected);
    EXPECT_EQ(l.spine_bytes(), b.blocks.size() * (1 + 32 + 80));
    TempDir dir;
    write_store(l, dir.path());
    EXPECT_EQ(std::filesystem::file_size(dir / BODIES_FILE), expected);
    const std::string m = read_text(dir / MANIFEST_FILE);
    EXPECT_EQ(manifest_number(m, "body_bytes"), expected);
    EXPECT_EQ(manifest_number(m, "body_records"), b.blocks.size());
}

TEST(Store, PrunedCountsInManifest)
{
    const Built b = build(small_plan(4, 11));
    StrategySet set;
    set.prune = PruneConfig::blocks(3);
    const CompactionResult r = compact_chain(b.blocks, b.state, set);
    TempDir dir;
    write_store(r.ledger, dir.path());
    const std::string m = read_text(dir / MANIFEST_FILE);
    EXPECT_EQ(manifest_number(m, "spine_entries"), 11u);
    EXPECT_EQ(manifest_number(m, "spine_headers"), 4u);
    EXPECT_EQ(manifest_number(m, "body_records"), 4u);
    EXPECT_EQ(manifest_number(m, "prune_blocks"), 3u);
    EXPECT_EQ(read_store(dir.path()), r.ledger);
}

TEST(Store, FullRoundTripWithEveryStrategy)
{
    const Built b = build(small_plan(5, 120));
    StrategySet set;
    set.prune = PruneConfig::blocks(60);
    set.minimize = set.slack = set.dedup = true;
    const CompactionResult r = compact_chain(b.blocks, b.state, set);
    TempDir dir;
    const std::uint64_t written = write_store(r.ledger, dir.path());
    EXPECT_EQ(written, r.ledger.retained_bytes());
    EXPECT_EQ(written, std::filesystem::file_size(dir / SPINE_FILE) + std::filesystem::file_size(dir / BODIES_FILE) +
                           std::filesystem::file_size(dir / SCRIPTS_FILE));
    EXPECT_EQ(read_store(dir.path()), r.ledger);
    // Writing the same ledger twice is byte-identical.
    TempDir again;
    write_store(r.ledger, again.path());
    for (const char* f : {SPINE_FILE, BODIES_FILE, SCRIPTS_FILE, MANIFEST_FILE}) EXPECT_EQ(slurp(dir / f), slurp(again / f));
}

TEST(Store, TruncatedFinalRecordNamesIndex)
{
    const Built b = build(small_plan(6, 12));
    TempDir dir;
    write_store(full_ledger(b.blocks), dir.path());
    Bytes bodies = slurp(dir / BODIES_FILE);
    bodies.resize(bodies.size() - 5);
    spit(dir / BODIES_FILE, bodies);
    std::string what;
    EXPECT_EQ(read_error(dir.path(), &what), StoreError::Kind::truncated);
    EXPECT_NE(what.find("record 11"), std::string::npos) << what;
}

TEST(Store, ManifestCountOffByOne)
{
    const Built b = build(small_plan(6, 12));
    TempDir dir;
    write_store(full_ledger(b.blocks), dir.path());
    const std::string m = read_text(dir / MANIFEST_FILE);
    write_text(dir / MANIFEST_FILE, replace_line(m, "body_records", "13"));
    std::string what;
    EXPECT_EQ(read_error(dir.path(), &what), StoreError::Kind::manifest_mismatch);
    EXPECT_NE(what.find("body_records"), std::string::npos) << what;
}

TEST(Store, UnsupportedVersionAndUnparsableManifest)
{
    TempDir dir;
    write_store(Ledger{}, dir.path());
    const std::string m = read_text(dir / MANIFEST_FILE);
    write_text(dir / MANIFEST_FILE, replace_line(m, "format_version", "2"));
    EXPECT_EQ(read_error(dir.path()), StoreError::Kind::unsupported_version);
    write_text(dir / MANIFEST_FILE, "this is not a manifest\n");
    EXPECT_EQ(read_error(dir.path()), StoreError::Kind::manifest_parse);
    std::filesystem::remove(dir / MANIFEST_FILE);
    EXPECT_EQ(read_error(dir.path()), StoreError::Kind::io);
}

TEST(Store, UnknownBodyKind)
{
    const Built b = build(small_plan(6, 5));
    TempDir dir;
    write_store(full_ledger(b.blocks), dir.path());
    Bytes bodies = slurp(dir / BODIES_FILE);
    bodies[0] = 7;
    spit(dir / BODIES_FILE, bodies);
    std::string what;
    EXPECT_EQ(read_error(dir.path(), &what), StoreError::Kind::unknown_kind);
    EXPECT_NE(what.find("record 0"), std::string::npos) << what;
}

TEST(Store, FlippedPayloadByteIsCorrupt)
{
    const Built b = build(small_plan(6, 5));
    TempDir dir;
    write_store(full_ledger(b.blocks), dir.path());
    Bytes spine = slurp(dir / SPINE_FILE);
    spine[40] ^= 0x01;
    spit(dir / SPINE_FILE, spine);
    EXPECT_EQ(read_error(dir.path()), StoreError::Kind::corrupt);
    const IntegrityReport rep = integrity_check(dir.path());
    ASSERT_FALSE(rep.ok());
    EXPECT_EQ(rep.failures[0].check, "read");
}

TEST(Store, FlippedSpineHashBreaksContinuity)
{
    const Built b = build(small_plan(6, 10));
    Ledger l = full_ledger(b.blocks);
    EXPECT_TRUE(integrity_check(l).ok());
    l.spine[4].hash.data()[0] ^= 0x01;
    const IntegrityReport rep = integrity_check(l);
    ASSERT_FALSE(rep.ok());
    bool continuity = false;
    for (const IntegrityFailure& f : rep.failures) continuity = continuity || f.check == "continuity";
    EXPECT_TRUE(continuity);
}

TEST(Store, TamperedBodyFailsMerkle)
{
    const Built b = build(small_plan(6, 10));
    Ledger l = full_ledger(b.blocks);
    Bytes& p = l.bodies[3].payload;
    p[p.size() - 5] ^= 0x01; // inside the last output script
    const IntegrityReport rep = integrity_check(l);
    ASSERT_FALSE(rep.ok());
    EXPECT_EQ(rep.failures[0].height, std::optional<Height>(3));
}

TEST(Store, IntegrityPassesForEveryStrategyCombination)
{
    const Built b = build(small_plan(8, 150));
    StrategySet all;
    all.prune = PruneConfig::blocks(40);
    all.minimize = all.slack = all.dedup = true;
    for (const StrategySet& s : all.subsets()) {
        const CompactionResult r = compact_chain(b.blocks, b.state, s);
        TempDir dir;
        write_store(r.ledger, dir.path());
        const IntegrityReport rep = integrity_check(dir.path());
        EXPECT_TRUE(rep.ok()) << s.label() << ": " << (rep.ok() ? "" : rep.failures[0].check + " " + rep.failures[0].detail);
        EXPECT_EQ(rep.spine_entries, b.blocks.size());
    }
}
