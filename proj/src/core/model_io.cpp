#include "core/model_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace hybridrec {
namespace {

constexpr char kMagic[8] = {'H', 'R', 'E', 'C', 'M', 'D', 'L', '1'};
constexpr uint32_t kMaxDim = 1u << 28;  // sanity cap on stored counts

struct Writer {
    std::string buf;

    void u32(uint32_t v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void f64s(const std::vector<double>& v) {
        for (double x : v) f64(x);
    }
    void raw(const void* p, size_t n) { buf.append(static_cast<const char*>(p), n); }
};

struct Reader {
    std::string data;
    size_t pos = 0;
    const std::string& path;

    explicit Reader(std::string bytes, const std::string& p) : data(std::move(bytes)), path(p) {}

    [[noreturn]] void corrupt(const std::string& why) const {
        fail(ErrorKind::Parse, path + ": corrupt model file (" + why + ")");
    }
    void raw(void* out, size_t n) {
        if (data.size() - pos < n) corrupt("truncated");
        std::memcpy(out, data.data() + pos, n);
        pos += n;
    }
    uint32_t u32() {
        uint32_t v;
        raw(&v, sizeof v);
        return v;
    }
    uint32_t dim(const char* what) {
        uint32_t v = u32();
        if (v > kMaxDim) corrupt(std::string("implausible ") + what);
        return v;
    }
    double f64() {
        double v;
        raw(&v, sizeof v);
        if (!std::isfinite(v)) corrupt("non-finite value");
        return v;
    }
    void f64s(std::vector<double>& out, size_t n) {
        if ((data.size() - pos) / sizeof(double) < n) corrupt("truncated");
        out.resize(n);
        for (size_t i = 0; i < n; ++i) out[i] = f64();
    }
};

void write_bias(Writer& w, const BiasModel& b) {
    w.u32(b.mode == BaselineMode::Offsets ? 0 : 1);
    w.u32(static_cast<uint32_t>(b.user_mean.size()));
    w.u32(static_cast<uint32_t>(b.item_mean.size()));
    w.f64(b.global_mean);
    w.f64s(b.user_mean);
    w.f64s(b.item_mean);
}

BiasModel read_bias(Reader& r) {
    BiasModel b;
    uint32_t mode = r.u32();
    if (mode > 1) r.corrupt("bad baseline mode");
    b.mode = mode == 0 ? BaselineMode::Offsets : BaselineMode::MeanSum;
    uint32_t m = r.dim("user count");
    uint32_t n = r.dim("item count");
    b.global_mean = r.f64();
    r.f64s(b.user_mean, m);
    r.f64s(b.item_mean, n);
    return b;
}

void write_store(Writer& w, const NeighborStore& s) {
    w.f64(s.params.shrink);
    w.u32(s.params.top_n);
    w.u32(s.params.axis == Axis::User ? 0 : 1);
    w.u32(static_cast<uint32_t>(s.neighbors.size()));
    for (const auto& list : s.neighbors) {
        w.u32(static_cast<uint32_t>(list.size()));
        for (const Neighbor& n : list) {
            w.u32(n.index);
            w.f64(n.score);
        }
    }
}

NeighborStore read_store(Reader& r) {
    NeighborStore s;
    s.params.shrink = r.f64();
    s.params.top_n = r.u32();
    uint32_t axis = r.u32();
    if (axis > 1) r.corrupt("bad axis");
    s.params.axis = axis == 0 ? Axis::User : Axis::Item;
    uint32_t count = r.dim("entity count");
    s.neighbors.resize(count);
    for (uint32_t e = 0; e < count; ++e) {
        uint32_t len = r.u32();
        if (len > s.params.top_n) r.corrupt("neighbor list longer than top_n");
        s.neighbors[e].resize(len);
        for (auto& n : s.neighbors[e]) {
            n.index = r.u32();
            if (n.index >= count || n.index == e) r.corrupt("bad neighbor index");
            n.score = r.f64();
        }
    }
    return s;
}

void write_factor(Writer& w, const FactorModel& f) {
    w.u32(f.k);
    w.u32(f.num_users());
    w.u32(f.num_items());
    w.f64(f.global_mean);
    w.f64s(f.p);
    w.f64s(f.q);
}

FactorModel read_factor(Reader& r) {
    FactorModel f;
    f.k = r.dim("factor count");
    if (f.k == 0) r.corrupt("zero factor count");
    uint32_t m = r.dim("user count");
    uint32_t n = r.dim("item count");
    f.global_mean = r.f64();
    r.f64s(f.p, static_cast<size_t>(m) * f.k);
    r.f64s(f.q, static_cast<size_t>(n) * f.k);
    return f;
}

void write_integrated(Writer& w, const IntegratedModel& m) {
    w.u32(m.version == IntegratedVersion::V1 ? 1 : 2);
    w.u32(m.k);
    w.u32(static_cast<uint32_t>(m.bu.size()));
    w.u32(static_cast<uint32_t>(m.bi.size()));
    w.f64(m.global_mean);
    w.f64s(m.bu);
    w.f64s(m.bi);
    w.f64s(m.p);
    w.f64s(m.q);
    write_bias(w, m.bias);
    write_store(w, m.store);
    for (const auto& row : m.w) w.f64s(row);
    w.f64s(m.a1);
    w.f64s(m.a2);
    w.f64s(m.a3);
}

IntegratedModel read_integrated(Reader& r) {
    IntegratedModel m;
    uint32_t version = r.u32();
    if (version != 1 && version != 2) r.corrupt("bad version");
    m.version = version == 1 ? IntegratedVersion::V1 : IntegratedVersion::V2;
    m.k = r.dim("factor count");
    if (m.k == 0) r.corrupt("zero factor count");
    uint32_t users = r.dim("user count");
    uint32_t items = r.dim("item count");
    m.global_mean = r.f64();
    r.f64s(m.bu, users);
    r.f64s(m.bi, items);
    r.f64s(m.p, static_cast<size_t>(users) * m.k);
    r.f64s(m.q, static_cast<size_t>(items) * m.k);
    m.bias = read_bias(r);
    m.store = read_store(r);
    if (m.store.neighbors.size() != items) r.corrupt("neighbor store size mismatch");
    m.w.resize(items);
    for (uint32_t i = 0; i < items; ++i) r.f64s(m.w[i], m.store.neighbors[i].size());
    r.f64s(m.a1, users);
    r.f64s(m.a2, users);
    r.f64s(m.a3, users);
    return m;
}

}  // namespace

void save_model(const TrainedModel& m, const std::string& path) {
    Writer w;
    w.raw(kMagic, sizeof kMagic);
    w.u32(static_cast<uint32_t>(model_algo(m)));
    struct Visitor {
        Writer& w;
        void operator()(const BiasModel& b) const { write_bias(w, b); }
        void operator()(const CfModel& c) const {
            write_bias(w, c.bias);
            write_store(w, c.store);
        }
        void operator()(const FactorModel& f) const { write_factor(w, f); }
        void operator()(const IntegratedModel& i) const { write_integrated(w, i); }
    };
    std::visit(Visitor{w}, m);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
    out.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
    if (!out.flush()) fail(ErrorKind::Io, "write error on '" + path + "'");
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open model file '" + path + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader r(std::move(bytes), path);

    char magic[8];
    r.raw(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof magic) != 0) r.corrupt("bad magic");
    uint32_t tag = r.u32();

    TrainedModel m;
    switch (tag) {
        case 0:
            m = read_bias(r);
            break;
        case 1:
        case 2: {
            CfModel c;
            c.bias = read_bias(r);
            c.store = read_store(r);
            if ((tag == 2) != (c.store.params.axis == Axis::Item)) r.corrupt("axis/tag mismatch");
            m = std::move(c);
            break;
        }
        case 3:
            m = read_factor(r);
            break;
        case 4:
        case 5: {
            IntegratedModel im = read_integrated(r);
            if ((tag == 5) != (im.version == IntegratedVersion::V2)) r.corrupt("version/tag mismatch");
            m = std::move(im);
            break;
        }
        default:
            r.corrupt("unknown algorithm tag");
    }
    if (r.pos != r.data.size()) r.corrupt("trailing bytes");
    return m;
}

}  // namespace hybridrec
