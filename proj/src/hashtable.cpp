#include "rhlab/hashtable.hpp"

#include <cassert>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "rhlab/errors.hpp"

namespace rhlab {

namespace {

constexpr std::uint64_t kGuardFactor = 64;
constexpr std::uint32_t kNotLive = std::numeric_limits<std::uint32_t>::max();

// Token carried through an insertion: a key and the probe index it is trying.
struct Token {
    std::uint64_t key;
    std::uint32_t age;
};

// True when the carried token takes slot from its incumbent.
bool challenger_wins(Discipline d, std::uint32_t challenger_age, std::uint32_t incumbent_age) {
    switch (d) {
        case Discipline::FCFS:
            return false;
        case Discipline::LCFS:
            return true;
        case Discipline::RH:
            return challenger_age > incumbent_age;
    }
    return false;
}

}  // namespace

std::string_view to_string(Discipline d) noexcept {
    switch (d) {
        case Discipline::FCFS:
            return "fcfs";
        case Discipline::LCFS:
            return "lcfs";
        case Discipline::RH:
            return "rh";
    }
    return "?";
}

Discipline parse_discipline(std::string_view text) {
    if (text == "fcfs" || text == "FCFS") return Discipline::FCFS;
    if (text == "lcfs" || text == "LCFS") return Discipline::LCFS;
    if (text == "rh" || text == "RH") return Discipline::RH;
    throw ValidationError("unknown discipline '" + std::string(text) + "'");
}

Table::Table(std::size_t m, Discipline discipline, std::uint64_t seed)
    : discipline_(discipline), seed_(seed), probe_(seed, m) {
    if (m < 1) {
        throw ValidationError("table size must be >= 1");
    }
    if (m >= kNotLive) {
        throw ValidationError("table size must be below 2^32 - 1");
    }
    slots_.resize(m);
    live_pos_.assign(m, kNotLive);
}

std::uint32_t Table::canonical_age(std::uint64_t key, std::uint32_t age, std::uint64_t slot) const {
    // Random probing may revisit a slot; a search stops at the first visit,
    // so that is the age the key is recorded with.
    for (std::uint32_t j = 1; j < age; ++j) {
        if (probe_(key, j) == slot) {
            return j;
        }
    }
    return age;
}

void Table::place(std::uint64_t slot, std::uint64_t key, std::uint32_t probe_index) {
    Slot& s = slots_[slot];
    if (!s.occupied()) {
        if (s.state == SlotState::Deleted) {
            --deleted_;
        }
        live_pos_[slot] = static_cast<std::uint32_t>(live_.size());
        live_.push_back(static_cast<std::uint32_t>(slot));
    }
    s.key = key;
    s.probe_index = probe_index;
    s.age = canonical_age(key, probe_index, slot);
    s.state = SlotState::Occupied;
}

InsertionReceipt Table::insert(std::uint64_t key, CollisionObserver* observer) {
    if (size() + 1 >= capacity()) {
        throw CapacityError("table full: inserting would leave no free slot (n = " +
                            std::to_string(size()) + ", m = " + std::to_string(capacity()) + ")");
    }

    const std::uint64_t guard = kGuardFactor * capacity();
    InsertionReceipt receipt;
    Token token{key, 1};
    while (true) {
        if (++receipt.slots_inspected > guard) {
            throw LivelockError("insert: more than 64*m probes for key " + std::to_string(key));
        }
        const std::uint64_t s = probe_(token.key, token.age);
        Slot& slot = slots_[s];
        if (!slot.occupied()) {
            place(s, token.key, token.age);
            if (token.key == key) {
                receipt.final_age = slot.age;
            }
            return receipt;
        }
        const bool take = challenger_wins(discipline_, token.age, slot.probe_index);
        if (observer != nullptr) {
            CollisionEvent ev{s, 0, 0, 0, 0, !take};
            if (take) {
                ev.winner_key = token.key, ev.winner_age = token.age;
                ev.loser_key = slot.key, ev.loser_age = slot.probe_index;
            } else {
                ev.winner_key = slot.key, ev.winner_age = slot.probe_index;
                ev.loser_key = token.key, ev.loser_age = token.age;
            }
            observer->on_collision(ev);
        }
        if (take) {
            const Token evicted{slot.key, slot.probe_index};
            slot.key = token.key;
            slot.probe_index = token.age;
            slot.age = canonical_age(token.key, token.age, s);
            if (token.key == key) {
                receipt.final_age = slot.age;
            }
            token = evicted;
            ++receipt.displacements;
        }
        ++token.age;
    }
}

std::uint64_t Table::delete_random(CounterRng& rng) {
    if (live_.empty()) {
        throw ValidationError("delete_random: table is empty");
    }
    const std::uint64_t pick = rng.below(live_.size());
    const std::uint32_t slot = live_[pick];
    const std::uint64_t key = slots_[slot].key;
    mark_deleted(slot);
    return key;
}

bool Table::erase(std::uint64_t key) {
    const auto where = find(key);
    if (!where) {
        return false;
    }
    mark_deleted(*where);
    return true;
}

void Table::mark_deleted(std::size_t slot) {
    slots_[slot].state = SlotState::Deleted;
    ++deleted_;
    // Swap-remove from the registry.
    const std::uint32_t pos = live_pos_[slot];
    const std::uint32_t last = live_.back();
    live_[pos] = last;
    live_pos_[last] = pos;
    live_.pop_back();
    live_pos_[slot] = kNotLive;
}

std::uint32_t Table::search_standard(std::uint64_t key) const {
    const std::uint64_t guard = kGuardFactor * capacity();
    for (std::uint64_t j = 1; j <= guard; ++j) {
        const Slot& s = slots_[probe_(key, j)];
        if (s.state == SlotState::Empty) {
            break;
        }
        if (s.occupied() && s.key == key) {
            return static_cast<std::uint32_t>(j);
        }
    }
    throw NotFoundError("search_standard: key " + std::to_string(key) + " not found");
}

std::optional<std::size_t> Table::find(std::uint64_t key) const {
    try {
        return probe_(key, search_standard(key));
    } catch (const NotFoundError&) {
        return std::nullopt;
    }
}

std::uint64_t Table::search_mean_centered(std::uint64_t key, double center) const {
    const std::uint64_t cap = kGuardFactor * capacity();
    const double rounded = std::round(center);
    const std::uint64_t j0 = rounded < 1.0 ? 1 : static_cast<std::uint64_t>(rounded);
    std::uint64_t inspected = 0;
    const auto hit = [&](std::uint64_t j) {
        ++inspected;
        const Slot& s = slots_[probe_(key, j)];
        return s.occupied() && s.key == key;
    };
    if (j0 <= cap && hit(j0)) {
        return inspected;
    }
    for (std::uint64_t k = 1;; ++k) {
        const bool up_ok = j0 + k <= cap;
        const bool down_ok = j0 > k;
        if (!up_ok && !down_ok) {
            break;
        }
        if (up_ok && hit(j0 + k)) {
            return inspected;
        }
        if (down_ok && hit(j0 - k)) {
            return inspected;
        }
    }
    throw NotFoundError("search_mean_centered: key " + std::to_string(key) + " not found");
}

std::map<std::uint32_t, std::uint64_t> Table::age_histogram() const {
    std::map<std::uint32_t, std::uint64_t> hist;
    for (const std::uint32_t s : live_) {
        ++hist[slots_[s].age];
    }
    return hist;
}

bool Table::check_invariants() const {
    std::size_t occupied = 0;
    std::size_t deleted = 0;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        const Slot& s = slots_[i];
        if (s.state == SlotState::Deleted) {
            ++deleted;
        }
        if (!s.occupied()) {
            if (live_pos_[i] != kNotLive) return false;
            continue;
        }
        ++occupied;
        if (s.age < 1 || s.age > s.probe_index || probe_(s.key, s.age) != i ||
            probe_(s.key, s.probe_index) != i || canonical_age(s.key, s.probe_index, i) != s.age) {
            return false;
        }
        if (live_pos_[i] >= live_.size() || live_[live_pos_[i]] != i) return false;
    }
    return occupied == live_.size() && deleted == deleted_ && occupied < slots_.size();
}

void Table::export_snapshot(std::ostream& out) const {
    out << "index,state,key,age\n";
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        const Slot& s = slots_[i];
        switch (s.state) {
            case SlotState::Empty:
                out << i << ",E,,\n";
                break;
            case SlotState::Deleted:
                out << i << ",D,,\n";
                break;
            case SlotState::Occupied:
                out << i << ",O," << s.key << ',' << s.age << '\n';
                break;
        }
    }
}

std::vector<SnapshotRow> parse_snapshot(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "index,state,key,age") {
        throw ValidationError("snapshot: missing header 'index,state,key,age'");
    }
    std::vector<SnapshotRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string index, state, key, age;
        std::getline(fields, index, ',');
        std::getline(fields, state, ',');
        std::getline(fields, key, ',');
        std::getline(fields, age, ',');
        SnapshotRow row;
        row.index = std::stoull(index);
        if (state == "E") {
            row.state = SlotState::Empty;
        } else if (state == "D") {
            row.state = SlotState::Deleted;
        } else if (state == "O") {
            row.state = SlotState::Occupied;
            row.key = std::stoull(key);
            row.age = static_cast<std::uint32_t>(std::stoul(age));
        } else {
            throw ValidationError("snapshot: bad state '" + state + "' on row " + index);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace rhlab
