#include "rest/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads are little-endian");

namespace rest {

namespace {

constexpr char kMagic[8] = {'R', 'E', 'S', 'T', 'C', 'K', 'P', 'T'};
constexpr std::uint8_t kDtypeF64 = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_str(std::ostream& out, const std::string& s) {
    write_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}
void write_tensor(std::ostream& out, const std::string& name, const Tensor& t) {
    write_str(out, name);
    out.put(static_cast<char>(kDtypeF64));
    out.put(static_cast<char>(t.rank()));
    for (std::size_t d : t.shape()) write_u64(out, d);
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
}

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
std::string read_str(std::istream& in) {
    auto n = read_u64(in);
    if (n > (1ull << 32)) throw DataError("corrupt checkpoint: oversized string");
    std::string s(n, '\0');
    in.read(s.data(), static_cast<std::streamsize>(n));
    return s;
}
std::pair<std::string, Tensor> read_tensor(std::istream& in) {
    std::string name = read_str(in);
    auto dtype = static_cast<std::uint8_t>(in.get());
    if (dtype != kDtypeF64) throw DataError("unsupported tensor dtype in checkpoint");
    auto rank = static_cast<std::uint8_t>(in.get());
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = read_u64(in);
    Tensor t(shape);
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
    return {std::move(name), std::move(t)};
}

std::string config_text(const Checkpoint& c) {
    std::ostringstream out;
    const ModelConfig& m = c.params.config;
    out << "dim=" << m.dim << '\n'
        << "layers=" << m.layers << '\n'
        << "dropout=" << m.dropout << '\n'
        << "message_fn=" << to_string(m.message_fn) << '\n'
        << "update_fn=" << to_string(m.update_fn) << '\n'
        << "init_mode=" << to_string(m.init_mode) << '\n'
        << "scope=" << to_string(m.scope) << '\n'
        << "hops=" << m.hops << '\n'
        << "epoch=" << c.epoch << '\n'
        << "adam_step=" << c.adam_step << '\n';
    return out.str();
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open checkpoint for writing: " + path.string());

    out.write(kMagic, sizeof kMagic);
    write_u32(out, ckpt.format_version);
    write_str(out, config_text(ckpt));

    write_u64(out, ckpt.relations.base_count());
    for (const std::string& name : ckpt.relations.base_names()) write_str(out, name);

    std::vector<std::pair<std::string, const Tensor*>> tensors;
    ckpt.params.for_each_tensor(
        [&](const std::string& name, const Tensor& t) { tensors.emplace_back(name, &t); });
    const bool with_moments = !ckpt.adam_m.empty();
    if (with_moments && (ckpt.adam_m.size() != tensors.size() ||
                         ckpt.adam_v.size() != tensors.size()))
        throw RuntimeError("optimizer moment count does not match parameter count");

    write_u64(out, tensors.size() * (with_moments ? 3 : 1));
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        write_tensor(out, tensors[i].first, *tensors[i].second);
        if (with_moments) {
            write_tensor(out, "adam.m." + tensors[i].first, ckpt.adam_m[i]);
            write_tensor(out, "adam.v." + tensors[i].first, ckpt.adam_v[i]);
        }
    }
    if (!out) throw DataError("checkpoint write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path.string());

    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw DataError("not a checkpoint file: " + path.string());
    std::uint32_t version = read_u32(in);
    if (version != kCheckpointVersion)
        throw DataError("unsupported checkpoint version " + std::to_string(version));

    auto kv = parse_config_text(read_str(in));
    auto need = [&](const char* key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw DataError(std::string("checkpoint config missing ") + key);
        return it->second;
    };

    Checkpoint ckpt;
    ckpt.format_version = version;
    ModelConfig cfg;
    cfg.dim = std::stoul(need("dim"));
    cfg.layers = std::stoul(need("layers"));
    cfg.dropout = std::stod(need("dropout"));
    cfg.message_fn = message_fn_from(need("message_fn"));
    cfg.update_fn = update_fn_from(need("update_fn"));
    cfg.init_mode = init_mode_from(need("init_mode"));
    cfg.scope = scope_from(need("scope"));
    cfg.hops = static_cast<std::uint32_t>(std::stoul(need("hops")));
    ckpt.epoch = static_cast<std::uint32_t>(std::stoul(need("epoch")));
    ckpt.adam_step = std::stoull(need("adam_step"));

    auto base_count = read_u64(in);
    for (std::uint64_t i = 0; i < base_count; ++i) ckpt.relations.intern(read_str(in));
    if (base_count == 0) throw DataError("checkpoint has an empty relation vocabulary");

    ckpt.params = ModelParams::init(cfg, base_count, 0);
    std::map<std::string, Tensor> loaded;
    auto tensor_count = read_u64(in);
    for (std::uint64_t i = 0; i < tensor_count; ++i) {
        auto [name, t] = read_tensor(in);
        loaded.emplace(std::move(name), std::move(t));
    }
    if (!in) throw DataError("truncated checkpoint: " + path.string());

    bool with_moments = loaded.count("adam.m.rel_emb") > 0;
    ckpt.params.for_each_tensor([&](const std::string& name, Tensor& t) {
        auto it = loaded.find(name);
        if (it == loaded.end()) throw DataError("checkpoint missing tensor " + name);
        if (it->second.shape() != t.shape())
            throw DataError("checkpoint tensor " + name + " has shape " +
                            it->second.shape_str() + ", expected " + t.shape_str());
        t = std::move(it->second);
        if (with_moments) {
            ckpt.adam_m.push_back(std::move(loaded.at("adam.m." + name)));
            ckpt.adam_v.push_back(std::move(loaded.at("adam.v." + name)));
        }
    });
    return ckpt;
}

}  // namespace rest
