#include "fracsep/process.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace fracsep {

Configuration Configuration::empty(int64_t W) {
    if (W <= 0) throw std::domain_error("configuration: window must be positive");
    Configuration c;
    c.W = W;
    c.occ.assign(static_cast<size_t>(2 * W), 0);
    c.slot.assign(static_cast<size_t>(2 * W), -1);
    return c;
}

void Configuration::add_particle(int64_t x) {
    if (!in_window(x)) throw std::out_of_range("configuration: site outside window");
    size_t i = index(x);
    if (occ[i]) throw std::invalid_argument("configuration: site already occupied");
    occ[i] = 1;
    slot[i] = static_cast<int32_t>(particles.size());
    particles.push_back(x);
}

void Configuration::move_particle(int64_t from, int64_t to) {
    size_t fi = index(from), ti = index(to);
    int32_t s = slot[fi];
    occ[fi] = 0;
    slot[fi] = -1;
    occ[ti] = 1;
    slot[ti] = s;
    particles[static_cast<size_t>(s)] = to;
}

double Configuration::block_average(int64_t base, int64_t ell, Side side) const {
    if (ell <= 0) throw std::domain_error("block_average: block length must be positive");
    int64_t lo = (side == Side::Right) ? base + 1 : base - ell;
    int64_t hi = (side == Side::Right) ? base + ell : base - 1;
    if (lo < -W || hi >= W) throw std::out_of_range("block_average: block leaves the window");
    int64_t cnt = 0;
    for (int64_t x = lo; x <= hi; ++x) cnt += occ[index(x)];
    return static_cast<double>(cnt) / static_cast<double>(ell);
}

Configuration sample_initial(const std::function<double(double)>& profile, double n, int64_t W, Rng& rng) {
    Configuration c = Configuration::empty(W);
    for (int64_t x = -W; x < W; ++x) {
        double p = profile(static_cast<double>(x) / n);
        p = std::clamp(p, 0.0, 1.0);
        if (rng.bernoulli(p)) c.add_particle(x);
    }
    return c;
}

double transition_rate(const Configuration& cfg, int64_t x, int64_t y, const JumpKernel& kernel,
                       const BarrierSpec& barrier, double n) {
    if (x == y) throw std::domain_error("transition_rate: need distinct sites");
    if (!cfg.in_window(x) || !cfg.in_window(y)) throw std::out_of_range("transition_rate: site outside window");
    bool ox = cfg.occupied(x), oy = cfg.occupied(y);
    if (ox == oy) return 0.0;
    double w = barrier.is_slow(x, y) ? barrier.slow_weight(n) : 1.0;
    return 0.5 * kernel.pmf(x - y) * w;
}

namespace {

std::vector<uint64_t> pack_bits(const std::vector<uint8_t>& occ) {
    std::vector<uint64_t> words((occ.size() + 63) / 64, 0);
    for (size_t i = 0; i < occ.size(); ++i)
        if (occ[i]) words[i >> 6] |= (uint64_t{1} << (i & 63));
    return words;
}

}  // namespace

Configuration TrajectoryObservation::configuration_at(size_t i) const {
    const Snapshot& s = snapshots.at(i);
    Configuration c = Configuration::empty(W);
    for (size_t b = 0; b < static_cast<size_t>(2 * W); ++b)
        if (s.bits[b >> 6] & (uint64_t{1} << (b & 63))) c.add_particle(static_cast<int64_t>(b) - W);
    return c;
}

TrajectoryObservation simulate(const Configuration& init, const JumpKernel& kernel, const BarrierSpec& barrier,
                               double n, const std::vector<double>& schedule, Rng& rng,
                               const SimulateOptions& opts) {
    if (!(n > 0)) throw std::domain_error("simulate: n must be positive");
    barrier.validate(kernel);
    for (size_t i = 0; i + 1 < schedule.size(); ++i)
        if (!(schedule[i] < schedule[i + 1])) throw std::invalid_argument("simulate: schedule must increase");
    if (!schedule.empty() && schedule.front() < 0.0) throw std::invalid_argument("simulate: negative time");

    TrajectoryObservation obs;
    obs.gamma = kernel.gamma();
    obs.n = n;
    obs.W = init.W;

    Configuration cfg = init;
    int64_t signed_cross = 0;
    uint64_t total_cross = 0;

    auto record = [&](double at) {
        Snapshot s;
        s.time = at;
        s.signed_crossings = signed_cross;
        s.total_crossings = total_cross;
        s.bits = pack_bits(cfg.occ);
        obs.snapshots.push_back(std::move(s));
    };

    size_t si = 0;
    if (schedule.empty()) return obs;

    const double envelope = barrier.max_weight(n);
    const double wslow = (barrier.kind == BarrierKind::None) ? 1.0 : barrier.slow_weight(n);
    const double accept_fast = 1.0 / envelope;
    const double accept_slow = wslow / envelope;
    const size_t P = cfg.particle_count();
    const double total_rate = std::pow(n, kernel.gamma()) * envelope * static_cast<double>(P);

    if (P == 0) {
        for (; si < schedule.size(); ++si) record(schedule[si]);
        return obs;
    }

    double t = 0.0;
    for (;;) {
        double tn = t + rng.exponential(total_rate);
        while (si < schedule.size() && schedule[si] <= tn) record(schedule[si++]);
        if (si == schedule.size()) break;
        t = tn;

        if (++obs.proposals > opts.max_events)
            throw std::runtime_error("simulate: event budget exceeded, trajectory incomplete");

        int64_t x = cfg.particles[rng.below(P)];
        int64_t y = x + kernel.sample(rng);
        if (!cfg.in_window(y) || cfg.occupied(y)) continue;

        double acc = barrier.is_slow(x, y) ? accept_slow : accept_fast;
        if (acc < 1.0 && !rng.bernoulli(acc)) continue;

        cfg.move_particle(x, y);
        ++obs.accepted;
        if (x < 0 && y >= 0) {
            ++signed_cross;
            ++total_cross;
        } else if (x >= 0 && y < 0) {
            --signed_cross;
            ++total_cross;
        }
    }
    return obs;
}

double empirical_pairing(const Configuration& cfg, double n, const std::function<double(double)>& f,
                         double support_b) {
    int64_t need = static_cast<int64_t>(std::ceil(support_b * n));
    if (need > cfg.W)
        throw std::runtime_error("empirical_pairing: window clips the test function support");
    KahanSum acc;
    for (int64_t x : cfg.particles) acc.add(f(static_cast<double>(x) / n));
    return acc.value() / n;
}

namespace {
constexpr uint64_t kTrajMagic = 0x314a52545045'5346ull;  // "FS EPTRJ1" packed

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("trajectory: truncated stream");
    return v;
}
}  // namespace

void write_trajectory_bin(std::ostream& os, const TrajectoryObservation& obs) {
    put(os, kTrajMagic);
    put(os, uint32_t{1});
    put(os, obs.gamma);
    put(os, obs.n);
    put(os, obs.W);
    put(os, static_cast<uint64_t>(obs.snapshots.size()));
    for (const Snapshot& s : obs.snapshots) {
        put(os, s.time);
        put(os, s.signed_crossings);
        put(os, s.total_crossings);
        put(os, static_cast<uint64_t>(s.bits.size()));
        for (uint64_t w : s.bits) put(os, w);
    }
}

TrajectoryObservation read_trajectory_bin(std::istream& is) {
    if (get<uint64_t>(is) != kTrajMagic) throw std::runtime_error("trajectory: bad magic");
    if (get<uint32_t>(is) != 1) throw std::runtime_error("trajectory: unsupported version");
    TrajectoryObservation obs;
    obs.gamma = get<double>(is);
    obs.n = get<double>(is);
    obs.W = get<int64_t>(is);
    uint64_t count = get<uint64_t>(is);
    obs.snapshots.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        Snapshot s;
        s.time = get<double>(is);
        s.signed_crossings = get<int64_t>(is);
        s.total_crossings = get<uint64_t>(is);
        uint64_t words = get<uint64_t>(is);
        s.bits.resize(words);
        for (uint64_t j = 0; j < words; ++j) s.bits[j] = get<uint64_t>(is);
        obs.snapshots.push_back(std::move(s));
    }
    return obs;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryObservation& obs, const CsvMeta& meta) {
    write_meta_line(os, meta);
    os << "time,site\n";
    for (const Snapshot& s : obs.snapshots) {
        for (size_t b = 0; b < static_cast<size_t>(2 * obs.W); ++b)
            if (s.bits[b >> 6] & (uint64_t{1} << (b & 63)))
                os << fmt_double(s.time) << "," << (static_cast<int64_t>(b) - obs.W) << "\n";
    }
}

}  // namespace fracsep
