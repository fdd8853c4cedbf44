#include "tnt/io.hpp"

#include <cstring>
#include <fstream>
#include <limits>

namespace tnt {

namespace {

constexpr std::uint32_t kDtVersion = 1;
constexpr std::uint32_t kTnzVersion = 1;

// Integers and doubles are written little-endian byte by byte so files are
// identical across hosts.

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw IoError(IoCode::open_failed, "cannot open " + path.string() + " for writing");
    }

    void magic(const char m[4]) { out_.write(m, 4); }

    void u32(std::uint32_t v) {
        char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out_.write(b, 4);
    }

    void u64(std::uint64_t v) {
        char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out_.write(b, 8);
    }

    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }

    void payload(const std::vector<double>& data) {
        for (double v : data) f64(v);
    }

    void check() {
        if (!out_) throw IoError(IoCode::open_failed, "write failed");
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
        if (!in_) throw IoError(IoCode::open_failed, "cannot open " + path.string());
    }

    void magic(const char expect[4], const char* which) {
        char m[4];
        if (!in_.read(m, 4) || std::memcmp(m, expect, 4) != 0)
            throw IoError(IoCode::bad_magic, std::string("bad magic: not a ") + which + " file");
    }

    std::uint32_t u32() {
        char b[4];
        if (!in_.read(b, 4)) throw IoError(IoCode::truncated, "truncated file (u32)");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        return v;
    }

    std::uint64_t u64() {
        char b[8];
        if (!in_.read(b, 8)) throw IoError(IoCode::truncated, "truncated file (u64)");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        return v;
    }

    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    std::vector<double> payload(Index count) {
        std::vector<double> data(static_cast<std::size_t>(count));
        for (auto& v : data) v = f64();
        return data;
    }

private:
    std::ifstream in_;
};

Shape read_shape(Reader& r) {
    const std::uint32_t order = r.u32();
    if (order > 64) throw IoError(IoCode::overflow, "implausible tensor order");
    std::vector<Index> dims(order);
    std::uint64_t count = 1;
    for (auto& d : dims) {
        const std::uint64_t v = r.u64();
        if (v == 0 || v > std::uint64_t{1} << 40)
            throw IoError(IoCode::overflow, "mode size out of range");
        if (count > (std::uint64_t{1} << 40) / v)
            throw IoError(IoCode::overflow, "element count overflow");
        count *= v;
        d = static_cast<Index>(v);
    }
    return Shape(dims);
}

void write_shape(Writer& w, const Shape& s) {
    w.u32(static_cast<std::uint32_t>(s.order()));
    for (Index d : s.dims()) w.u64(static_cast<std::uint64_t>(d));
}

DenseTensor read_record(Reader& r) {
    Shape s = read_shape(r);
    return DenseTensor(s, r.payload(s.count()));
}

void write_record(Writer& w, const DenseTensor& t) {
    write_shape(w, t.shape());
    w.payload(t.data());
}

}  // namespace

void write_dense(const std::filesystem::path& path, const DenseTensor& t) {
    Writer w(path);
    w.magic("DTEN");
    w.u32(kDtVersion);
    write_record(w, t);
    w.check();
}

DenseTensor read_dense(const std::filesystem::path& path) {
    Reader r(path);
    r.magic("DTEN", "dense tensor");
    const std::uint32_t version = r.u32();
    if (version != kDtVersion)
        throw IoError(IoCode::bad_version, "unsupported .dt version " + std::to_string(version));
    return read_record(r);
}

const char* tnz_format_name(TnzFormat f) {
    switch (f) {
        case TnzFormat::cp: return "cp";
        case TnzFormat::tucker: return "tucker";
        case TnzFormat::tt: return "tt";
        case TnzFormat::mpo: return "mpo";
        case TnzFormat::tc: return "tc";
    }
    return "?";
}

void write_tnz(const std::filesystem::path& path, const TnzContainer& c) {
    Writer w(path);
    w.magic("TNET");
    w.u32(kTnzVersion);
    w.u32(static_cast<std::uint32_t>(c.format));
    write_shape(w, c.original_shape);
    w.u32(c.plan ? 1u : 0u);
    if (c.plan) {
        w.u32(c.plan->matrix_interleave ? 1u : 0u);
        w.u32(static_cast<std::uint32_t>(c.plan->mode_factors.size()));
        for (const auto& f : c.plan->mode_factors) {
            w.u32(static_cast<std::uint32_t>(f.size()));
            for (Index v : f) w.u64(static_cast<std::uint64_t>(v));
        }
    }
    w.f64(c.eps);

    std::vector<DenseTensor> records;
    switch (c.format) {
        case TnzFormat::cp: {
            const auto& k = std::get<KruskalTensor>(c.payload);
            records.push_back(from_vector(k.weights));
            for (const auto& f : k.factors) records.push_back(from_matrix(f));
            break;
        }
        case TnzFormat::tucker: {
            const auto& t = std::get<TuckerTensor>(c.payload);
            records.push_back(t.core);
            for (const auto& f : t.factors) records.push_back(from_matrix(f));
            break;
        }
        case TnzFormat::tt: {
            for (const auto& core : std::get<TTTensor>(c.payload).cores()) records.push_back(core);
            break;
        }
        case TnzFormat::mpo: {
            for (const auto& core : std::get<TTMatrix>(c.payload).cores()) records.push_back(core);
            break;
        }
        case TnzFormat::tc: {
            for (const auto& core : std::get<TCTensor>(c.payload).cores()) records.push_back(core);
            break;
        }
    }
    w.u32(static_cast<std::uint32_t>(records.size()));
    for (const auto& rec : records) write_record(w, rec);
    w.check();
}

TnzContainer read_tnz(const std::filesystem::path& path) {
    Reader r(path);
    r.magic("TNET", "tensor network");
    const std::uint32_t version = r.u32();
    if (version != kTnzVersion)
        throw IoError(IoCode::bad_version, "unsupported .tnz version " + std::to_string(version));
    const std::uint32_t tag = r.u32();
    if (tag < 1 || tag > 5) throw IoError(IoCode::bad_tag, "unknown format tag " + std::to_string(tag));

    TnzContainer c;
    c.format = static_cast<TnzFormat>(tag);
    c.original_shape = read_shape(r);
    if (r.u32()) {
        QuantizationPlan plan;
        plan.matrix_interleave = r.u32() != 0;
        const std::uint32_t modes = r.u32();
        for (std::uint32_t m = 0; m < modes; ++m) {
            const std::uint32_t k = r.u32();
            std::vector<Index> f(k);
            for (auto& v : f) v = static_cast<Index>(r.u64());
            plan.mode_factors.push_back(std::move(f));
        }
        plan.validate();
        c.plan = std::move(plan);
    }
    c.eps = r.f64();

    const std::uint32_t n_records = r.u32();
    std::vector<DenseTensor> records;
    records.reserve(n_records);
    for (std::uint32_t k = 0; k < n_records; ++k) records.push_back(read_record(r));

    try {
        switch (c.format) {
            case TnzFormat::cp: {
                if (records.empty()) throw std::invalid_argument("cp payload needs records");
                KruskalTensor k;
                k.weights = records[0].as_vector();
                for (std::size_t i = 1; i < records.size(); ++i) {
                    const auto& rec = records[i];
                    if (rec.order() != 2) throw std::invalid_argument("cp factor is not a matrix");
                    k.factors.push_back(rec.as_matrix(rec.dim(0), rec.dim(1)));
                }
                k.validate();
                c.payload = std::move(k);
                break;
            }
            case TnzFormat::tucker: {
                if (records.empty()) throw std::invalid_argument("tucker payload needs records");
                TuckerTensor t;
                t.core = records[0];
                for (std::size_t i = 1; i < records.size(); ++i) {
                    const auto& rec = records[i];
                    if (rec.order() != 2) throw std::invalid_argument("tucker factor is not a matrix");
                    t.factors.push_back(rec.as_matrix(rec.dim(0), rec.dim(1)));
                }
                t.validate();
                c.payload = std::move(t);
                break;
            }
            case TnzFormat::tt:
                c.payload = TTTensor(std::move(records));
                break;
            case TnzFormat::mpo:
                c.payload = TTMatrix(std::move(records));
                break;
            case TnzFormat::tc:
                c.payload = TCTensor(std::move(records));
                break;
        }
    } catch (const std::invalid_argument& e) {
        throw IoError(IoCode::rank_chain, e.what());
    }
    return c;
}

DenseTensor tnz_densify(const TnzContainer& c) {
    DenseTensor dense = std::visit(
        [](const auto& payload) -> DenseTensor {
            using T = std::decay_t<decltype(payload)>;
            if constexpr (std::is_same_v<T, KruskalTensor>) return cp_full(payload);
            else if constexpr (std::is_same_v<T, TuckerTensor>) return tucker_full(payload);
            else if constexpr (std::is_same_v<T, TTTensor>) return tt_full(payload);
            else if constexpr (std::is_same_v<T, TCTensor>) return tc_full(payload);
            else {
                MatrixXd m = mpo_to_matrix(payload);
                return from_matrix(m);
            }
        },
        c.payload);
    if (c.plan) return dequantize(reshape(dense, c.plan->quantized_shape()), *c.plan);
    return reshape(dense, c.original_shape);
}

}  // namespace tnt
