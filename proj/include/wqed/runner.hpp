// runner.hpp — Deterministic parallel cell execution and evaluator caching
//
// Grid cells are independent tasks pulled from an atomic queue; results land
// in preallocated slots keyed by cell index, so output order never depends on
// scheduling. The bundle cache shares immutable spectra between cells with
// the same parameters and can spill to WQED_CACHE_DIR.

#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "wqed/observables.hpp"

namespace wqed {

// Execute fn(0..n_cells-1); fn must only touch its own slot. workers <= 1 or
// n_cells <= 1 runs serially on the calling thread.
template <class Fn>
void run_cells(std::size_t n_cells, int workers, Fn&& fn) {
    if (workers <= 1 || n_cells <= 1) {
        for (std::size_t i = 0; i < n_cells; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_cells) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<std::size_t>(workers, n_cells);
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

inline int default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace detail {

// ----------------------------- binary spill codec ---------------------------

inline constexpr std::uint64_t spill_magic = 0x5751454443414331ull; // "WQEDCAC1"

inline void put_bytes(std::ofstream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}
inline bool get_bytes(std::ifstream& is, void* p, std::size_t n) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(is.gcount()) == n;
}

inline void put_matrix(std::ofstream& os, const Eigen::MatrixXcd& m) {
    const std::int64_t r = m.rows(), c = m.cols();
    put_bytes(os, &r, sizeof r);
    put_bytes(os, &c, sizeof c);
    put_bytes(os, m.data(), sizeof(cplx) * static_cast<std::size_t>(r * c));
}
inline bool get_matrix(std::ifstream& is, Eigen::MatrixXcd& m) {
    std::int64_t r = 0, c = 0;
    if (!get_bytes(is, &r, sizeof r) || !get_bytes(is, &c, sizeof c)) return false;
    if (r < 0 || c < 0 || r * c > (1 << 26)) return false;
    m.resize(r, c);
    return get_bytes(is, m.data(), sizeof(cplx) * static_cast<std::size_t>(r * c));
}

inline void put_real_matrix(std::ofstream& os, const Eigen::MatrixXd& m) {
    const std::int64_t r = m.rows(), c = m.cols();
    put_bytes(os, &r, sizeof r);
    put_bytes(os, &c, sizeof c);
    put_bytes(os, m.data(), sizeof(double) * static_cast<std::size_t>(r * c));
}
inline bool get_real_matrix(std::ifstream& is, Eigen::MatrixXd& m) {
    std::int64_t r = 0, c = 0;
    if (!get_bytes(is, &r, sizeof r) || !get_bytes(is, &c, sizeof c)) return false;
    if (r < 0 || c < 0 || r * c > (1 << 26)) return false;
    m.resize(r, c);
    return get_bytes(is, m.data(), sizeof(double) * static_cast<std::size_t>(r * c));
}

inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string params_cache_key(const LatticeParams& p) {
    const std::array<double, 7> fields{p.hopping,  p.interaction, p.quasiperiodic,
                                       p.incommensuration, p.coupling, p.loss,
                                       p.pulse_width};
    std::uint64_t h = fnv1a(&p.sites, sizeof p.sites, 14695981039346656037ull);
    h = fnv1a(fields.data(), sizeof fields, h);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string("wqed-bundle-") + buf + ".bin";
}

} // namespace detail

// Shared immutable bundles keyed by parameter point. If WQED_CACHE_DIR is set
// the eigensystems are spilled to disk and reloaded bit-identically.
class BundleCache {
public:
    BundleCache() {
        if (const char* dir = std::getenv("WQED_CACHE_DIR")) spill_dir_ = dir;
    }

    std::shared_ptr<const SystemBundle> get(const LatticeParams& p) {
        const std::string key = detail::params_cache_key(p);
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = map_.find(key);
            if (it != map_.end()) return it->second;
        }
        std::shared_ptr<const SystemBundle> bundle = load_spill(p, key);
        if (!bundle) {
            bundle = std::make_shared<SystemBundle>(p);
            store_spill(*bundle, key);
        }
        std::lock_guard<std::mutex> lock(mu_);
        auto [it, inserted] = map_.emplace(key, bundle);
        return it->second;
    }

private:
    std::shared_ptr<const SystemBundle> load_spill(const LatticeParams& p,
                                                   const std::string& key) const {
        if (spill_dir_.empty()) return nullptr;
        std::ifstream is(std::filesystem::path(spill_dir_) / key, std::ios::binary);
        if (!is) return nullptr;
        std::uint64_t magic = 0;
        if (!detail::get_bytes(is, &magic, sizeof magic) || magic != detail::spill_magic)
            return nullptr;
        HermitianSpectrum c1{1, {}, {}}, c2{2, {}, {}};
        Eigen::MatrixXd v1, v2, vec1, vec2;
        if (!detail::get_real_matrix(is, v1) || !detail::get_real_matrix(is, vec1) ||
            !detail::get_real_matrix(is, v2) || !detail::get_real_matrix(is, vec2))
            return nullptr;
        BiorthogonalSpectrum b1, b2;
        b1.sector = 1;
        b2.sector = 2;
        Eigen::MatrixXcd bv1, bv2;
        if (!detail::get_matrix(is, bv1) || !detail::get_matrix(is, b1.right) ||
            !detail::get_matrix(is, bv2) || !detail::get_matrix(is, b2.right) ||
            !detail::get_bytes(is, &b1.condition, sizeof b1.condition) ||
            !detail::get_bytes(is, &b2.condition, sizeof b2.condition))
            return nullptr;
        c1.values = v1.col(0);
        c1.vectors = vec1;
        c2.values = v2.col(0);
        c2.vectors = vec2;
        b1.values = bv1.col(0);
        b2.values = bv2.col(0);
        try {
            return std::make_shared<SystemBundle>(
                p, std::move(c1), std::move(c2),
                GreenEvaluator(p, std::move(b1), std::move(b2)));
        } catch (const Error&) {
            return nullptr;
        }
    }

    void store_spill(const SystemBundle& bundle, const std::string& key) const {
        if (spill_dir_.empty()) return;
        std::error_code ec;
        std::filesystem::create_directories(spill_dir_, ec);
        const auto path = std::filesystem::path(spill_dir_) / key;
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) return;
        detail::put_bytes(os, &detail::spill_magic, sizeof detail::spill_magic);
        detail::put_real_matrix(os, bundle.closed1.values);
        detail::put_real_matrix(os, bundle.closed1.vectors);
        detail::put_real_matrix(os, bundle.closed2.values);
        detail::put_real_matrix(os, bundle.closed2.vectors);
        const auto& s1 = bundle.evaluator.one_particle();
        const auto& s2 = bundle.evaluator.two_particle();
        detail::put_matrix(os, s1.values);
        detail::put_matrix(os, s1.right);
        detail::put_matrix(os, s2.values);
        detail::put_matrix(os, s2.right);
        detail::put_bytes(os, &s1.condition, sizeof s1.condition);
        detail::put_bytes(os, &s2.condition, sizeof s2.condition);
    }

    std::string spill_dir_;
    std::mutex mu_;
    std::map<std::string, std::shared_ptr<const SystemBundle>> map_;
};

} // namespace wqed
