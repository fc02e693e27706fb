#include "rainstick/block_sampler.hpp"

#include <string>

namespace rainstick {

const char* cap_kind_name(CapKind kind) noexcept {
    switch (kind) {
        case CapKind::none: return "none";
        case CapKind::site: return "site";
        case CapKind::drop: return "drop";
        case CapKind::step: return "step";
    }
    return "unknown";
}

StreamBlock first_block_from_stream(std::span<const Site> xs) {
    StreamBlock out;
    std::vector<bool> seen;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const Site x = xs[i];
        if (x < 1) throw DomainError("first_block_from_stream: site index must be >= 1");
        if (x > seen.size()) seen.resize(std::max<std::size_t>(x, 2 * seen.size()));
        if (!seen[x - 1]) {
            seen[x - 1] = true;
            out.prefix.push_back(x);
        }
        out.max_seen = std::max(out.max_seen, x);
        out.n = i + 1;
        if (out.max_seen == out.prefix.size()) {
            out.complete = true;
            out.k = out.max_seen;
            return out;
        }
    }
    return out;
}

Site sample_forgetful(double p, double escape_q, Rng& rng) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("sample_forgetful: p must lie in (0, 1)");
    if (!(escape_q > 0.0 && escape_q <= 1.0))
        throw DomainError("sample_forgetful: escape_q must lie in (0, 1]");
    const GeometricLaw jump(p);
    Site total = 0;
    do {
        total += jump.sample_beyond(0, rng);
    } while (!rng.bernoulli(escape_q));
    return total;
}

BlockOutcome sample_stretched_block(double alpha, Site site_cap, Rng& rng) {
    const StretchedExpLaw law(alpha);
    return sample_block_clocks(law, site_cap, rng);
}

}  // namespace rainstick
