#include <slimchain/store.hpp>

#include <slimchain/minimize.hpp>
#include <slimchain/slack.hpp>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

namespace slimchain {

namespace fs = std::filesystem;
using Kind = StoreError::Kind;

namespace {

constexpr std::uint8_t SPINE_HAS_HEADER = 0x01;
constexpr const char* FORMAT_NAME = "slimchain-store";

[[noreturn]] void truncated(const char* file, const char* what, std::size_t index, const DecodeError& e)
{
    throw StoreError(Kind::truncated, std::string(file) + ": " + what + " " + std::to_string(index) +
                                          " is truncated (" + e.what() + ")");
}

} // namespace

Bytes encode_spine(const std::vector<SpineEntry>& spine)
{
    Bytes out;
    for (const SpineEntry& e : spine) {
        put_u8(out, e.header ? SPINE_HAS_HEADER : 0);
        put_bytes(out, e.hash.view());
        if (e.header) append_header(out, *e.header);
    }
    return out;
}

std::vector<SpineEntry> decode_spine(ByteView data)
{
    std::vector<SpineEntry> spine;
    ByteReader r(data);
    while (!r.empty()) {
        const std::size_t index = spine.size();
        try {
            SpineEntry e;
            const std::uint8_t flags = r.u8("spine flags");
            if (flags & ~SPINE_HAS_HEADER) {
                throw StoreError(Kind::corrupt, std::string(SPINE_FILE) + ": entry " + std::to_string(index) +
                                                    " has unknown flags " + std::to_string(flags));
            }
            e.hash = Hash256(r.bytes(Hash256::size, "spine hash"));
            if (flags & SPINE_HAS_HEADER) e.header = read_header(r);
            spine.push_back(std::move(e));
        } catch (const DecodeError& e) {
            truncated(SPINE_FILE, "entry", index, e);
        }
    }
    return spine;
}

Bytes encode_bodies(const std::vector<BodyRecord>& bodies)
{
    Bytes out;
    for (const BodyRecord& b : bodies) {
        put_u8(out, static_cast<std::uint8_t>(b.kind));
        append_varint(out, b.height);
        append_varint(out, b.payload.size());
        put_bytes(out, b.payload);
    }
    return out;
}

std::vector<BodyRecord> decode_bodies(ByteView data)
{
    std::vector<BodyRecord> bodies;
    ByteReader r(data);
    while (!r.empty()) {
        const std::size_t index = bodies.size();
        try {
            BodyRecord b;
            const std::uint8_t kind = r.u8("record kind");
            if (kind > static_cast<std::uint8_t>(BodyKind::compact)) {
                throw StoreError(Kind::unknown_kind, std::string(BODIES_FILE) + ": record " + std::to_string(index) +
                                                         " has unknown kind " + std::to_string(kind));
            }
            b.kind = static_cast<BodyKind>(kind);
            const std::uint64_t height = r.varint("record height").value;
            if (height > 0xFFFFFFFFULL) {
                throw StoreError(Kind::corrupt, std::string(BODIES_FILE) + ": record " + std::to_string(index) +
                                                    " height out of range");
            }
            b.height = static_cast<Height>(height);
            if (!bodies.empty() && b.height <= bodies.back().height) {
                throw StoreError(Kind::corrupt, std::string(BODIES_FILE) + ": record " + std::to_string(index) +
                                                    " height " + std::to_string(b.height) + " is not ascending");
            }
            const std::uint64_t len = r.varint("record length").value;
            if (len > r.remaining()) r.fail("record payload", "payload runs past end of file");
            ByteView p = r.bytes(static_cast<std::size_t>(len), "record payload");
            b.payload.assign(p.begin(), p.end());
            bodies.push_back(std::move(b));
        } catch (const DecodeError& e) {
            truncated(BODIES_FILE, "record", index, e);
        }
    }
    return bodies;
}

Bytes encode_kvs(const ScriptKvs& kvs)
{
    Bytes out;
    for (const auto& [key, script] : kvs.entries()) {
        put_bytes(out, key);
        append_varint(out, script.size());
        put_bytes(out, script);
    }
    return out;
}

ScriptKvs decode_kvs(ByteView data)
{
    ScriptKvs kvs;
    ByteReader r(data);
    std::size_t index = 0;
    while (!r.empty()) {
        try {
            ByteView k = r.bytes(SCRIPT_REF_WIDTH, "script key");
            const std::uint64_t len = r.varint("script length").value;
            if (len > r.remaining()) r.fail("script", "script runs past end of file");
            ByteView script = r.bytes(static_cast<std::size_t>(len), "script");
            ScriptKey key;
            std::copy(k.begin(), k.end(), key.begin());
            if (script_key(script) != key) {
                throw StoreError(Kind::corrupt, std::string(SCRIPTS_FILE) + ": entry " + std::to_string(index) +
                                                    " key does not match its script");
            }
            if (kvs.find(key)) {
                throw StoreError(Kind::corrupt,
                                 std::string(SCRIPTS_FILE) + ": entry " + std::to_string(index) + " repeats a key");
            }
            kvs.insert(script);
        } catch (const DecodeError& e) {
            truncated(SCRIPTS_FILE, "entry", index, e);
        }
        ++index;
    }
    return kvs;
}

namespace {

std::string optional_number(const std::optional<std::uint64_t>& v)
{
    return v ? std::to_string(*v) : "none";
}

std::string digest_hex(ByteView b)
{
    return to_hex(sha256(b).view());
}

ByteView as_bytes(const std::string& s)
{
    return ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

} // namespace

std::string encode_manifest(const Ledger& l, const Bytes& spine, const Bytes& bodies, const Bytes& scripts)
{
    std::ostringstream m;
    const auto tip = l.tip();
    m << "format=" << FORMAT_NAME << '\n'
      << "format_version=" << STORE_FORMAT_VERSION << '\n'
      << "magic=" << magic_hex(l.magic) << '\n'
      << "tip_height=" << (tip ? std::to_string(*tip) : "none") << '\n'
      << "prune_blocks=" << optional_number(l.strategies.prune_blocks) << '\n'
      << "minimize=" << int(l.strategies.minimize) << '\n'
      << "slack=" << int(l.strategies.slack) << '\n'
      << "dedup=" << int(l.strategies.dedup) << '\n'
      << "spine_entries=" << l.spine.size() << '\n'
      << "spine_headers=" << l.header_count() << '\n'
      << "body_records=" << l.bodies.size() << '\n'
      << "raw_records=" << l.count(BodyKind::raw) << '\n'
      << "minimized_records=" << l.count(BodyKind::minimized) << '\n'
      << "compact_records=" << l.count(BodyKind::compact) << '\n'
      << "script_entries=" << l.kvs.size() << '\n'
      << "spine_bytes=" << spine.size() << '\n'
      << "body_bytes=" << bodies.size() << '\n'
      << "script_bytes=" << scripts.size() << '\n'
      << "retained_bytes=" << spine.size() + bodies.size() + scripts.size() << '\n'
      << "spine_sha256=" << digest_hex(spine) << '\n'
      << "bodies_sha256=" << digest_hex(bodies) << '\n'
      << "scripts_sha256=" << digest_hex(scripts) << '\n';
    std::string text = m.str();
    text += "manifest_sha256=" + digest_hex(as_bytes(text)) + '\n';
    return text;
}

namespace {

void write_file(const fs::path& path, ByteView data)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError(Kind::io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) {
        throw StoreError(Kind::io, "write to " + path.string() + " failed (" + std::to_string(data.size()) +
                                       " bytes at offset 0)");
    }
}

Bytes read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreError(Kind::io, "cannot open " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw StoreError(Kind::io, "read of " + path.string() + " failed");
    return data;
}

} // namespace

std::uint64_t write_store(const Ledger& ledger, const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw StoreError(Kind::io, "cannot create " + dir.string() + ": " + ec.message());
    const Bytes spine = encode_spine(ledger.spine);
    const Bytes bodies = encode_bodies(ledger.bodies);
    const Bytes scripts = encode_kvs(ledger.kvs);
    const std::string manifest = encode_manifest(ledger, spine, bodies, scripts);
    write_file(dir / SPINE_FILE, spine);
    write_file(dir / BODIES_FILE, bodies);
    write_file(dir / SCRIPTS_FILE, scripts);
    write_file(dir / MANIFEST_FILE, as_bytes(manifest));
    return spine.size() + bodies.size() + scripts.size();
}

namespace {

class Manifest {
public:
    explicit Manifest(const std::string& text)
    {
        std::size_t pos = 0;
        std::size_t line_no = 0;
        while (pos < text.size()) {
            ++line_no;
            const std::size_t end = text.find('\n', pos);
            if (end == std::string::npos) {
                throw StoreError(Kind::manifest_parse, "manifest line " + std::to_string(line_no) + " is unterminated");
            }
            const std::string line = text.substr(pos, end - pos);
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw StoreError(Kind::manifest_parse, "manifest line " + std::to_string(line_no) + " is not key=value");
            }
            const std::string key = line.substr(0, eq);
            if (key == "manifest_sha256") m_signed_prefix = pos;
            if (!m_values.emplace(key, line.substr(eq + 1)).second) {
                throw StoreError(Kind::manifest_parse, "manifest key '" + key + "' repeated");
            }
            pos = end + 1;
        }
    }

    const std::string& get(const std::string& key) const
    {
        auto it = m_values.find(key);
        if (it == m_values.end()) throw StoreError(Kind::manifest_parse, "manifest lacks '" + key + "'");
        return it->second;
    }

    std::uint64_t number(const std::string& key) const
    {
        const std::string& v = get(key);
        std::uint64_t n = 0;
        if (v.empty() || v.size() > 19) throw StoreError(Kind::manifest_parse, "manifest '" + key + "' is not a number");
        for (char c : v) {
            if (c < '0' || c > '9') throw StoreError(Kind::manifest_parse, "manifest '" + key + "' is not a number");
            n = n * 10 + static_cast<std::uint64_t>(c - '0');
        }
        return n;
    }

    std::optional<std::uint64_t> optional_number(const std::string& key) const
    {
        if (get(key) == "none") return std::nullopt;
        return number(key);
    }

    bool flag(const std::string& key) const
    {
        const std::string& v = get(key);
        if (v != "0" && v != "1") throw StoreError(Kind::manifest_parse, "manifest '" + key + "' must be 0 or 1");
        return v == "1";
    }

    std::optional<std::size_t> signed_prefix() const noexcept { return m_signed_prefix; }

private:
    std::map<std::string, std::string> m_values;
    std::optional<std::size_t> m_signed_prefix;
};

void expect_count(const Manifest& m, const std::string& key, std::uint64_t actual)
{
    const std::uint64_t stated = m.number(key);
    if (stated != actual) {
        throw StoreError(Kind::manifest_mismatch, "manifest " + key + "=" + std::to_string(stated) +
                                                      " but the store holds " + std::to_string(actual));
    }
}

void expect_digest(const Manifest& m, const std::string& key, ByteView data, const char* file)
{
    if (m.get(key) != digest_hex(data)) {
        throw StoreError(Kind::corrupt, std::string(file) + " does not match its manifest digest");
    }
}

} // namespace

Ledger read_store(const fs::path& dir)
{
    const Bytes manifest_bytes = read_file(dir / MANIFEST_FILE);
    const std::string text(manifest_bytes.begin(), manifest_bytes.end());
    const Manifest m(text);

    if (m.get("format") != FORMAT_NAME) throw StoreError(Kind::manifest_parse, "not a slimchain store manifest");
    const std::uint64_t version = m.number("format_version");
    if (version != STORE_FORMAT_VERSION) {
        throw StoreError(Kind::unsupported_version, "unsupported store format version " + std::to_string(version));
    }

    Ledger l;
    try {
        l.magic = parse_magic(m.get("magic"));
    } catch (const std::invalid_argument& e) {
        throw StoreError(Kind::manifest_parse, std::string("manifest magic: ") + e.what());
    }
    l.strategies.prune_blocks = m.optional_number("prune_blocks");
    l.strategies.minimize = m.flag("minimize");
    l.strategies.slack = m.flag("slack");
    l.strategies.dedup = m.flag("dedup");

    const Bytes spine = read_file(dir / SPINE_FILE);
    const Bytes bodies = read_file(dir / BODIES_FILE);
    const Bytes scripts = read_file(dir / SCRIPTS_FILE);
    l.spine = decode_spine(spine);
    l.bodies = decode_bodies(bodies);
    l.kvs = decode_kvs(scripts);

    const auto tip = l.tip();
    const std::string stated_tip = m.get("tip_height");
    if (stated_tip != (tip ? std::to_string(*tip) : "none")) {
        throw StoreError(Kind::manifest_mismatch, "manifest tip_height=" + stated_tip + " disagrees with the spine");
    }
    expect_count(m, "spine_entries", l.spine.size());
    expect_count(m, "spine_headers", l.header_count());
    expect_count(m, "body_records", l.bodies.size());
    expect_count(m, "raw_records", l.count(BodyKind::raw));
    expect_count(m, "minimized_records", l.count(BodyKind::minimized));
    expect_count(m, "compact_records", l.count(BodyKind::compact));
    expect_count(m, "script_entries", l.kvs.size());
    expect_count(m, "spine_bytes", spine.size());
    expect_count(m, "body_bytes", bodies.size());
    expect_count(m, "script_bytes", scripts.size());
    expect_count(m, "retained_bytes", spine.size() + bodies.size() + scripts.size());

    expect_digest(m, "spine_sha256", spine, SPINE_FILE);
    expect_digest(m, "bodies_sha256", bodies, BODIES_FILE);
    expect_digest(m, "scripts_sha256", scripts, SCRIPTS_FILE);
    const auto prefix = m.signed_prefix();
    if (!prefix || m.get("manifest_sha256") != digest_hex(ByteView(manifest_bytes).first(*prefix))) {
        throw StoreError(Kind::corrupt, "manifest does not match its own digest");
    }
    return l;
}

namespace {

// Txids recoverable from the store itself, filled in height order.
class StoreResolver final : public TxResolver {
public:
    void add(Height h, std::uint32_t index, const Hash256& id) { m_ids[TxLocation{h, index}] = id; }

    std::optional<TxLocation> locate(const Hash256&) const override { return std::nullopt; }
    std::optional<Hash256> txid_at(TxLocation loc) const override
    {
        auto it = m_ids.find(loc);
        if (it == m_ids.end()) return std::nullopt;
        return it->second;
    }

private:
    std::map<TxLocation, Hash256> m_ids;
};

} // namespace

IntegrityReport integrity_check(const Ledger& l)
{
    IntegrityReport rep;
    auto fail = [&rep](std::optional<Height> h, std::string check, std::string detail) {
        rep.failures.push_back(IntegrityFailure{h, std::move(check), std::move(detail)});
    };

    rep.spine_entries = l.spine.size();
    for (std::size_t i = 0; i < l.spine.size(); ++i) {
        const Height h = static_cast<Height>(i);
        const SpineEntry& e = l.spine[i];
        if (!e.header) {
            ++rep.hash_only_heights;
            continue;
        }
        ++rep.headers;
        if (e.header->hash() != e.hash) fail(h, "header_hash", "header does not hash to the spine entry");
        if (i > 0 && e.header->prev_block_hash != l.spine[i - 1].hash) {
            fail(h, "continuity", "prev_block_hash does not match the spine at height " + std::to_string(h - 1));
        }
    }

    StoreResolver resolver;
    std::optional<Height> last;
    for (const BodyRecord& b : l.bodies) {
        const Height h = b.height;
        if (last && h <= *last) fail(h, "body_order", "body heights are not ascending");
        last = h;
        if (h >= l.spine.size()) {
            fail(h, "body_height", "body above the spine tip");
            continue;
        }
        const SpineEntry& e = l.spine[h];
        if (!e.header) {
            fail(h, "body_header", "body stored without a header in the spine");
            continue;
        }
        try {
            switch (b.kind) {
            case BodyKind::raw: {
                const Block block = decode_block(b.payload);
                if (block.hash() != e.hash) fail(h, "body_hash", "raw body header does not match the spine");
                if (!merkle_root_matches(block)) {
                    fail(h, "merkle_root", "transactions do not match the Merkle root");
                    break;
                }
                const auto ids = block_txids(block);
                for (std::uint32_t t = 0; t < ids.size(); ++t) resolver.add(h, t, ids[t]);
                ++rep.raw_bodies_verified;
                break;
            }
            case BodyKind::compact: {
                std::vector<std::uint32_t> unresolved;
                const Block block = decode_compact_block(b.payload, *e.header, h, resolver, &l.kvs, &unresolved);
                std::vector<bool> skip(block.transactions.size(), false);
                for (std::uint32_t t : unresolved) skip[t] = true;
                if (unresolved.empty()) {
                    if (!merkle_root_matches(block)) {
                        fail(h, "merkle_root", "compact transactions do not match the Merkle root");
                        break;
                    }
                    ++rep.compact_bodies_verified;
                } else {
                    ++rep.delegated_bodies;
                    rep.delegated_txs += unresolved.size();
                }
                for (std::uint32_t t = 0; t < block.transactions.size(); ++t) {
                    if (!skip[t]) resolver.add(h, t, txid(block.transactions[t]));
                }
                break;
            }
            case BodyKind::minimized: {
                std::vector<std::uint32_t> unresolved;
                const MinimizedBlock mb = decode_minimized(b.payload, *e.header, h, &resolver, &l.kvs, &unresolved);
                if (mb.block_hash != e.hash) fail(h, "minimized_hash", "copath record names another block");
                if (unresolved.empty()) {
                    if (!verify_minimized(mb)) {
                        fail(h, "copath", "kept transactions do not verify against the Merkle root");
                        break;
                    }
                    rep.minimized_txs_verified += mb.kept.size();
                } else {
                    ++rep.delegated_bodies;
                    rep.delegated_txs += unresolved.size();
                }
                for (const KeptTx& k : mb.kept) {
                    if (std::find(unresolved.begin(), unresolved.end(), k.position) == unresolved.end()) {
                        resolver.add(h, k.position, txid(k.tx));
                    }
                }
                break;
            }
            }
        } catch (const std::exception& ex) {
            fail(h, "body_decode", std::string(kind_name(b.kind)) + " body: " + ex.what());
        }
    }

    for (const auto& [key, script] : l.kvs.entries()) {
        ++rep.scripts_checked;
        if (script_key(script) != key) fail(std::nullopt, "script_key", "script does not hash to key " + to_hex(key));
    }
    return rep;
}

IntegrityReport integrity_check(const fs::path& dir)
{
    Ledger l;
    try {
        l = read_store(dir);
    } catch (const StoreError& e) {
        IntegrityReport rep;
        rep.failures.push_back(IntegrityFailure{std::nullopt, "read", e.what()});
        return rep;
    }
    return integrity_check(l);
}

} // namespace slimchain
