#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "idcre/field.hpp"
#include "idcre/idcode.hpp"
#include "idcre/polynomial.hpp"

namespace idcre {

/// Hard ceiling on interrogations of one device; the effective limit is
/// min(n, kInterrogationCap) since indices are never reused.
inline constexpr std::uint32_t kInterrogationCap = 2048;

class InterrogationLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Memoryless per-symbol substitution channel: with probability eps the
/// value is replaced by a uniform different field element, and independently
/// with probability eps the index by a uniform different index.
struct ChannelModel {
    double eps = 0.0;

    static ChannelModel noiseless() { return {}; }
    static ChannelModel symmetric(double eps) {
        ChannelModel c{eps};
        c.validate();
        return c;
    }

    bool is_noiseless() const { return eps == 0.0; }

    void validate() const {
        if (eps < 0.0 || eps > 1.0)
            throw std::invalid_argument("ChannelModel: eps must be in [0, 1]");
    }
};

template <FiniteField F>
std::uint64_t apply_value_noise(const F& field, const ChannelModel& ch, std::uint64_t v,
                                std::mt19937_64& rng, bool* corrupted = nullptr) {
    if (!ch.is_noiseless() && bernoulli(rng, ch.eps)) {
        if (corrupted) *corrupted = true;
        // uniform over the q-1 other elements
        const uint128 q = field.order();
        std::uint64_t r;
        if (q == (uint128{1} << 64)) {
            do r = rng();
            while (r == v);
        } else {
            r = uniform_below(rng, static_cast<std::uint64_t>(q) - 1);
            if (r >= v) ++r;
        }
        return field.element(r);
    }
    return v;
}

/// Channel pass for a full (index, value) message over a code of length n.
template <FiniteField F>
EncodedMessage apply_noise(const F& field, const ChannelModel& ch, EncodedMessage msg,
                           std::uint32_t n, std::mt19937_64& rng, bool* corrupted = nullptr) {
    ch.validate();
    if (corrupted) *corrupted = false;
    if (!ch.is_noiseless() && bernoulli(rng, ch.eps)) {
        if (corrupted) *corrupted = true;
        std::uint32_t j = static_cast<std::uint32_t>(uniform_below(rng, n - 1)) + 1;
        if (j >= msg.index) ++j;
        msg.index = j;
    }
    bool value_hit = false;
    msg.value = apply_value_noise(field, ch, msg.value, rng, &value_hit);
    if (corrupted && value_hit) *corrupted = true;
    return msg;
}

/// One line of the eavesdropper's view. Serialized as six space-separated
/// decimal integers: session_id cld_id direction index value noise_flag,
/// with -1 for an absent cld_id (unlinkable capture) or index (bare value)
/// and direction 0 = reader-to-device, 1 = device-to-reader.
struct TranscriptRecord {
    std::uint64_t session_id = 0;
    std::int64_t cld_id = -1;
    int direction = 0;
    std::int64_t index = -1;
    std::uint64_t value = 0;
    int noise_flag = 0;

    friend bool operator==(const TranscriptRecord&, const TranscriptRecord&) = default;
};

using Transcript = std::vector<TranscriptRecord>;

inline std::string to_line(const TranscriptRecord& r) {
    std::string s;
    s += std::to_string(r.session_id);
    s += ' ';
    s += std::to_string(r.cld_id);
    s += ' ';
    s += std::to_string(r.direction);
    s += ' ';
    s += std::to_string(r.index);
    s += ' ';
    s += std::to_string(r.value);
    s += ' ';
    s += std::to_string(r.noise_flag);
    return s;
}

inline TranscriptRecord parse_record_line(std::string_view line) {
    TranscriptRecord r;
    const char* p = line.data();
    const char* end = p + line.size();
    auto next = [&](auto& out) {
        while (p != end && *p == ' ') ++p;
        const auto [q, ec] = std::from_chars(p, end, out);
        if (ec != std::errc{}) throw std::invalid_argument("bad transcript line: " + std::string(line));
        p = q;
    };
    next(r.session_id);
    next(r.cld_id);
    next(r.direction);
    next(r.index);
    next(r.value);
    next(r.noise_flag);
    return r;
}

/// Capture sink shared by protocol sessions. When record_cld_ids is false
/// the records carry cld_id = -1 (the adversary cannot link sessions to a
/// device).
struct TranscriptLog {
    Transcript records;
    bool record_cld_ids = true;
    std::uint64_t next_session_id = 0;
};

/// Device-side state: the two shared secret polynomials, the evaluation
/// domain, and the interrogation counter.
template <FiniteField F>
class Cld {
public:
    enum class Status { accepted, rejected, exhausted };

    struct Response {
        Status status;
        std::uint64_t value = 0;  // P'(alpha_i) when accepted
    };

    Cld(const F& field, IdCode code, Polynomial p, Polynomial p_prime)
        : field_(field),
          code_(std::move(code)),
          p_(std::move(p)),
          p_prime_(std::move(p_prime)),
          interrogations_remaining_(
              std::min<std::uint32_t>(code_.length(), kInterrogationCap)) {}

    std::uint32_t interrogations_remaining() const { return interrogations_remaining_; }
    std::uint32_t domain_size() const { return code_.length(); }

    /// Verify the challenge against P and, if valid, answer with P'(alpha_i).
    /// A failed check rejects without consuming the counter.
    Response respond(const EncodedMessage& challenge) {
        if (interrogations_remaining_ == 0) return {Status::exhausted};
        if (challenge.index < 1 || challenge.index > code_.length()) return {Status::rejected};
        const std::uint64_t alpha = code_.points[challenge.index - 1];
        if (challenge.value != poly_eval(field_, p_, alpha)) return {Status::rejected};
        --interrogations_remaining_;
        return {Status::accepted, poly_eval(field_, p_prime_, alpha)};
    }

private:
    F field_;
    IdCode code_;
    Polynomial p_;
    Polynomial p_prime_;
    std::uint32_t interrogations_remaining_;
};

/// Reader-side state: a registry of device secrets plus per-device
/// without-replacement index bookkeeping, so no index is ever reused.
template <FiniteField F>
class Reader {
public:
    struct Challenge {
        std::uint32_t index;
        std::uint64_t value;  // P(alpha_i)
    };

    explicit Reader(const F& field) : field_(field) {}

    /// Registering an id again resets its index bookkeeping.
    void register_cld(std::uint64_t cld_id, IdCode code, Polynomial p, Polynomial p_prime) {
        Entry e{std::move(code), std::move(p), std::move(p_prime), {}, {}};
        e.unused_indices.resize(e.code.length());
        for (std::uint32_t j = 0; j < e.code.length(); ++j) e.unused_indices[j] = j + 1;
        registry_.insert_or_assign(cld_id, std::move(e));
    }

    bool knows(std::uint64_t cld_id) const { return registry_.contains(cld_id); }

    std::uint32_t unused_index_count(std::uint64_t cld_id) const {
        return static_cast<std::uint32_t>(entry(cld_id).unused_indices.size());
    }

    /// Draw a fresh index uniformly among those never sent to this device.
    Challenge challenge(std::uint64_t cld_id, std::mt19937_64& rng) {
        Entry& e = entry(cld_id);
        if (e.unused_indices.empty())
            throw InterrogationLimitError("reader: all " + std::to_string(e.code.length()) +
                                          " indices used for device " + std::to_string(cld_id));
        const std::size_t pick = uniform_below(rng, e.unused_indices.size());
        const std::uint32_t i = e.unused_indices[pick];
        e.unused_indices[pick] = e.unused_indices.back();
        e.unused_indices.pop_back();
        e.pending.insert(i);
        return {i, poly_eval(field_, e.p, e.code.points[i - 1])};
    }

    /// Check the device's answer for a challenge this reader actually issued.
    bool verify(std::uint64_t cld_id, std::uint32_t index, std::uint64_t response) {
        Entry& e = entry(cld_id);
        const auto it = e.pending.find(index);
        if (it == e.pending.end())
            throw std::logic_error("reader: no pending challenge with index " +
                                   std::to_string(index) + " for device " + std::to_string(cld_id));
        e.pending.erase(it);
        return response == poly_eval(field_, e.p_prime, e.code.points[index - 1]);
    }

    /// A device built from this reader's registry entry (the shared secrets).
    Cld<F> make_cld(std::uint64_t cld_id) const {
        const Entry& e = entry(cld_id);
        return Cld<F>(field_, e.code, e.p, e.p_prime);
    }

private:
    struct Entry {
        IdCode code;
        Polynomial p;
        Polynomial p_prime;
        std::vector<std::uint32_t> unused_indices;
        std::set<std::uint32_t> pending;
    };

    Entry& entry(std::uint64_t cld_id) {
        const auto it = registry_.find(cld_id);
        if (it == registry_.end())
            throw std::logic_error("reader: unknown device " + std::to_string(cld_id));
        return it->second;
    }
    const Entry& entry(std::uint64_t cld_id) const {
        const auto it = registry_.find(cld_id);
        if (it == registry_.end())
            throw std::logic_error("reader: unknown device " + std::to_string(cld_id));
        return it->second;
    }

    F field_;
    std::map<std::uint64_t, Entry> registry_;
};

enum class SessionOutcome { mutual_accept, cld_reject, reader_reject, limit };

inline const char* to_string(SessionOutcome o) {
    switch (o) {
        case SessionOutcome::mutual_accept: return "mutual-accept";
        case SessionOutcome::cld_reject: return "cld-reject";
        case SessionOutcome::reader_reject: return "reader-reject";
        case SessionOutcome::limit: return "limit";
    }
    return "?";
}

/// One full identification pass: challenge, channel, response, channel,
/// verification. The log receives exactly what the channel delivered (the
/// eavesdropper's view): two records for a completed session, one when the
/// device rejected, none when an interrogation limit stopped the session.
template <FiniteField F>
SessionOutcome run_session(const F& field, Reader<F>& reader, std::uint64_t cld_id, Cld<F>& cld,
                           const ChannelModel& channel, std::mt19937_64& rng,
                           TranscriptLog* log = nullptr) {
    const std::uint64_t session = log ? log->next_session_id++ : 0;
    const std::int64_t logged_cld =
        log && log->record_cld_ids ? static_cast<std::int64_t>(cld_id) : -1;

    typename Reader<F>::Challenge ch;
    try {
        ch = reader.challenge(cld_id, rng);
    } catch (const InterrogationLimitError&) {
        return SessionOutcome::limit;
    }

    bool hit = false;
    const std::uint32_t n = reader.knows(cld_id) ? 0 : 0;  // length comes with the message
    (void)n;
    EncodedMessage delivered =
        apply_noise(field, channel, {ch.index, ch.value}, cld_interrogation_domain_size(cld), rng, &hit);
    if (log)
        log->records.push_back({session, logged_cld, 0, static_cast<std::int64_t>(delivered.index),
                                delivered.value, hit ? 1 : 0});

    const auto response = cld.respond(delivered);
    if (response.status == Cld<F>::Status::exhausted) return SessionOutcome::limit;
    if (response.status == Cld<F>::Status::rejected) return SessionOutcome::cld_reject;

    bool hit2 = false;
    const std::uint64_t delivered_value = apply_value_noise(field, channel, response.value, rng, &hit2);
    if (log)
        log->records.push_back({session, logged_cld, 1, -1, delivered_value, hit2 ? 1 : 0});

    return reader.verify(cld_id, ch.index, delivered_value) ? SessionOutcome::mutual_accept
                                                            : SessionOutcome::reader_reject;
}

/// Recompute a recorded session's outcome from the delivered messages and
/// the shared secrets; reproduces run_session exactly on a noiseless
/// channel (delivered == issued).
template <FiniteField F>
SessionOutcome replay_session(const F& field, const IdCode& code, const Polynomial& p,
                              const Polynomial& p_prime, const TranscriptRecord& challenge,
                              const TranscriptRecord* response) {
    if (challenge.index < 1 || challenge.index > code.length())
        return SessionOutcome::cld_reject;
    const std::uint64_t alpha = code.points[static_cast<std::size_t>(challenge.index) - 1];
    if (challenge.value != poly_eval(field, p, alpha)) return SessionOutcome::cld_reject;
    if (response == nullptr) return SessionOutcome::cld_reject;
    return response->value == poly_eval(field, p_prime, alpha) ? SessionOutcome::mutual_accept
                                                               : SessionOutcome::reader_reject;
}

}  // namespace idcre
