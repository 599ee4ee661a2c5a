#include "semsar/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "semsar/error.hpp"

namespace semsar::io {

namespace {

constexpr std::size_t kMagicLen = 8;

class Writer {
public:
    void magic(const char* m) { buf_.insert(buf_.end(), m, m + kMagicLen); }
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) { put(v); }
    void u64(std::uint64_t v) { put(v); }
    void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
    void bytes(const std::vector<std::uint8_t>& b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

    void save(const fs::path& path) const {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw InvalidInput("cannot open '" + path.string() + "' for writing");
        f.write(reinterpret_cast<const char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
        if (!f) throw InvalidInput("write failed for '" + path.string() + "'");
    }

private:
    template <class U>
    void put(U v) {
        for (std::size_t i = 0; i < sizeof(U); ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    explicit Reader(const fs::path& path) : path_(path.string()) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw InvalidInput("cannot open '" + path_ + "'");
        buf_.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
    }

    void expect_magic(const char* m) {
        need(kMagicLen);
        if (std::memcmp(buf_.data() + pos_, m, kMagicLen) != 0) {
            throw InvalidInput("'" + path_ + "' is not a " + std::string(m, 4) + " file");
        }
        pos_ += kMagicLen;
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(buf_[pos_++]);
    }
    std::uint32_t u32() { return get<std::uint32_t>(); }
    std::uint64_t u64() { return get<std::uint64_t>(); }
    double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
    std::vector<std::uint8_t> bytes(std::size_t n) {
        need(n);
        std::vector<std::uint8_t> out(buf_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                      buf_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return out;
    }
    void expect_end() const {
        if (pos_ != buf_.size()) throw InvalidInput("'" + path_ + "' has trailing bytes");
    }
    const std::string& path() const { return path_; }

private:
    void need(std::size_t n) const {
        if (buf_.size() - pos_ < n) throw InvalidInput("'" + path_ + "' is truncated");
    }
    template <class U>
    U get() {
        need(sizeof(U));
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i)
            v |= static_cast<U>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
        pos_ += sizeof(U);
        return v;
    }

    std::string path_;
    std::vector<char> buf_;
    std::size_t pos_ = 0;
};

std::uint32_t dim(std::size_t n) {
    if (n > 0xffffffffu) throw InvalidInput("grid dimension exceeds 32 bits");
    return static_cast<std::uint32_t>(n);
}

template <class Tag>
void write_complex(const fs::path& path, const char* magic, const Grid<cplx, Tag>& g) {
    Writer w;
    w.magic(magic);
    w.u32(dim(g.rows()));
    w.u32(dim(g.cols()));
    for (const auto& v : g.values()) {
        w.f64(v.real());
        w.f64(v.imag());
    }
    w.save(path);
}

template <class Tag>
Grid<cplx, Tag> read_complex(const fs::path& path, const char* magic) {
    Reader r(path);
    r.expect_magic(magic);
    const std::size_t rows = r.u32();
    const std::size_t cols = r.u32();
    if (rows == 0 || cols == 0) throw InvalidInput("'" + r.path() + "' has an empty grid");
    std::vector<cplx> v(rows * cols);
    for (auto& x : v) {
        const double re = r.f64();
        const double im = r.f64();
        x = cplx(re, im);
    }
    r.expect_end();
    return Grid<cplx, Tag>(rows, cols, std::move(v));
}

void put_mask(Writer& w, const SamplingMask& mask) {
    w.magic("MASK0001");
    w.u32(dim(mask.rows()));
    w.u32(dim(mask.cols()));
    w.u8(static_cast<std::uint8_t>(mask.spec().kind));
    w.f64(mask.spec().eta);
    w.f64(mask.spec().eta_c);
    w.f64(mask.spec().eta_r);
    std::vector<std::uint8_t> bits((mask.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask.kept(i)) bits[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    w.bytes(bits);
}

MaskPtr get_mask(Reader& r) {
    r.expect_magic("MASK0001");
    const std::size_t rows = r.u32();
    const std::size_t cols = r.u32();
    if (rows == 0 || cols == 0) throw InvalidInput("'" + r.path() + "' has an empty mask");
    MaskSpec spec;
    const std::uint8_t kind = r.u8();
    if (kind < 1 || kind > 3) throw InvalidInput("'" + r.path() + "' has an unknown mask kind");
    spec.kind = static_cast<MaskKind>(kind);
    spec.eta = r.f64();
    spec.eta_c = r.f64();
    spec.eta_r = r.f64();
    const auto bits = r.bytes((rows * cols + 7) / 8);
    std::vector<std::uint8_t> kept(rows * cols);
    for (std::size_t i = 0; i < kept.size(); ++i) kept[i] = (bits[i / 8] >> (i % 8)) & 1u;
    return std::make_shared<const SamplingMask>(rows, cols, std::move(kept), spec);
}

} // namespace

void write_image(const fs::path& path, const ComplexImage& img) { write_complex(path, "CIMG0001", img); }
ComplexImage read_image(const fs::path& path) { return read_complex<ImageDomain>(path, "CIMG0001"); }

void write_spectrum(const fs::path& path, const PhaseHistory& ph) { write_complex(path, "CSPC0001", ph); }
PhaseHistory read_spectrum(const fs::path& path) { return read_complex<SpectrumDomain>(path, "CSPC0001"); }

void write_labels(const fs::path& path, const LabelMap& y) {
    Writer w;
    w.magic("LMAP0001");
    w.u32(dim(y.rows()));
    w.u32(dim(y.cols()));
    w.bytes(std::vector<std::uint8_t>(y.raw().begin(), y.raw().end()));
    w.save(path);
}

LabelMap read_labels(const fs::path& path) {
    Reader r(path);
    r.expect_magic("LMAP0001");
    const std::size_t rows = r.u32();
    const std::size_t cols = r.u32();
    if (rows == 0 || cols == 0) throw InvalidInput("'" + r.path() + "' has an empty grid");
    auto raw = r.bytes(rows * cols);
    r.expect_end();
    return LabelMap(rows, cols, std::move(raw));
}

void write_mask(const fs::path& path, const SamplingMask& mask) {
    Writer w;
    put_mask(w, mask);
    w.save(path);
}

MaskPtr read_mask(const fs::path& path) {
    Reader r(path);
    MaskPtr m = get_mask(r);
    r.expect_end();
    return m;
}

void write_measurement(const fs::path& path, const MeasurementVector& m) {
    Writer w;
    w.magic("CVEC0001");
    w.u64(m.size());
    for (const auto& v : m.values()) {
        w.f64(v.real());
        w.f64(v.imag());
    }
    put_mask(w, m.mask());
    w.save(path);
}

MeasurementVector read_measurement(const fs::path& path) {
    Reader r(path);
    r.expect_magic("CVEC0001");
    const std::uint64_t n = r.u64();
    if (n > (std::uint64_t{1} << 40)) throw InvalidInput("'" + r.path() + "' declares an implausible length");
    std::vector<cplx> v(n);
    for (auto& x : v) {
        const double re = r.f64();
        const double im = r.f64();
        x = cplx(re, im);
    }
    MaskPtr mask = get_mask(r);
    r.expect_end();
    return MeasurementVector(std::move(v), std::move(mask));
}

void write_pgm(const fs::path& path, const ComplexImage& img, const PgmOptions& opt) {
    if (opt.bits != 8 && opt.bits != 16) throw InvalidInput("pgm: bits must be 8 or 16");
    if (!(opt.dynamic_range_db > 0.0)) throw InvalidInput("pgm: dynamic range must be positive");
    const int top = opt.bits == 8 ? 255 : 65535;
    const double peak = max_magnitude(img);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidInput("cannot open '" + path.string() + "' for writing");
    f << "P5\n" << img.cols() << ' ' << img.rows() << '\n' << top << '\n';
    for (const auto& v : img.values()) {
        double t = 0.0;
        if (peak > 0.0) {
            const double rel = std::abs(v) / peak;
            if (opt.scale == PgmScale::Linear) {
                t = rel;
            } else if (rel > 0.0) {
                t = std::clamp(1.0 + 20.0 * std::log10(rel) / opt.dynamic_range_db, 0.0, 1.0);
            }
        }
        const auto q = static_cast<unsigned>(std::lround(t * top));
        if (opt.bits == 8) {
            f.put(static_cast<char>(q));
        } else {
            f.put(static_cast<char>(q >> 8));
            f.put(static_cast<char>(q & 0xff));
        }
    }
    if (!f) throw InvalidInput("write failed for '" + path.string() + "'");
}

void write_label_pgm(const fs::path& path, const LabelMap& y) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidInput("cannot open '" + path.string() + "' for writing");
    f << "P5\n" << y.cols() << ' ' << y.rows() << "\n255\n";
    for (auto v : y.raw()) f.put(static_cast<char>(v == 0 ? 0 : v == 1 ? 128 : 255));
    if (!f) throw InvalidInput("write failed for '" + path.string() + "'");
}

} // namespace semsar::io
