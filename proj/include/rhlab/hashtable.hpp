#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "rhlab/probe.hpp"

namespace rhlab {

/// Collision resolution discipline.
///  FCFS: the incumbent keeps the slot.
///  LCFS: the incoming token takes the slot.
///  RH:   the older token (larger age) keeps or takes the slot; ties keep the incumbent.
enum class Discipline { FCFS, LCFS, RH };

std::string_view to_string(Discipline d) noexcept;
Discipline parse_discipline(std::string_view text);

enum class SlotState : std::uint8_t { Empty, Deleted, Occupied };

struct Slot {
    std::uint64_t key = 0;
    /// Probes a standard search needs to reach the key: the first j >= 1 with
    /// probe(key, j) == this slot. Meaningful only when Occupied.
    std::uint32_t age = 0;
    /// Position in the key's probe stream at which it was placed. Equals `age`
    /// unless the stream revisited this slot; collisions compare this value
    /// and an evicted key resumes from it.
    std::uint32_t probe_index = 0;
    SlotState state = SlotState::Empty;

    bool occupied() const noexcept { return state == SlotState::Occupied; }
    friend bool operator==(const Slot&, const Slot&) = default;
};

struct InsertionReceipt {
    std::uint32_t final_age = 0;  ///< age of the inserted key once the insertion settles
    std::uint64_t slots_inspected = 0;
    std::uint64_t displacements = 0;
};

/// One contested slot during an insertion. Ages here are probe-stream
/// positions (Slot::probe_index for the incumbent).
struct CollisionEvent {
    std::uint64_t slot = 0;
    std::uint64_t winner_key = 0;
    std::uint32_t winner_age = 0;
    std::uint64_t loser_key = 0;
    std::uint32_t loser_age = 0;
    bool incumbent_won = false;
};

class CollisionObserver {
public:
    virtual ~CollisionObserver() = default;
    virtual void on_collision(const CollisionEvent& event) = 0;
};

/// Open-addressing table with random probing and deletion by marking.
///
/// Keys are opaque 64-bit identifiers; the table stores no values. At least
/// one slot is always non-occupied (n < m). Not thread-safe for writers.
class Table {
public:
    Table(std::size_t m, Discipline discipline, std::uint64_t seed);

    std::size_t capacity() const noexcept { return slots_.size(); }
    std::size_t size() const noexcept { return live_.size(); }
    std::size_t deleted_count() const noexcept { return deleted_; }
    double load() const noexcept {
        return static_cast<double>(size()) / static_cast<double>(capacity());
    }
    Discipline discipline() const noexcept { return discipline_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<Slot>& slots() const noexcept { return slots_; }
    const Slot& slot(std::size_t index) const { return slots_.at(index); }

    /// Slot index of the j-th probe (j >= 1) for `key`.
    std::uint64_t probe(std::uint64_t key, std::uint64_t j) const noexcept { return probe_(key, j); }

    /// Inserts a key that is not yet present. Throws CapacityError when the
    /// insertion would fill the last free slot and LivelockError when more
    /// than 64*m probes are spent.
    InsertionReceipt insert(std::uint64_t key, CollisionObserver* observer = nullptr);

    /// Marks a uniformly chosen occupied slot as Deleted and returns its key.
    std::uint64_t delete_random(CounterRng& rng);

    /// Marks the slot holding `key` as Deleted. Returns false when absent.
    bool erase(std::uint64_t key);

    /// Probes ages 1, 2, ... and returns the number of probes needed to reach
    /// `key`. Deleted slots are skipped; an Empty slot ends the search.
    std::uint32_t search_standard(std::uint64_t key) const;

    /// Probes ages outward from round(center): j0, j0+1, j0-1, j0+2, ...
    /// skipping ages below 1. Returns the number of slots inspected.
    std::uint64_t search_mean_centered(std::uint64_t key, double center) const;

    /// Slot holding `key`, found by standard search.
    std::optional<std::size_t> find(std::uint64_t key) const;

    /// Occupied count per age.
    std::map<std::uint32_t, std::uint64_t> age_histogram() const;

    /// Slot indices of occupied slots, in registry order.
    const std::vector<std::uint32_t>& live_slots() const noexcept { return live_; }

    /// Full-scan check that every occupied slot is the key's probe at its age
    /// and that the registry matches the slot array.
    bool check_invariants() const;

    /// Writes `index,state,key,age` rows (state in {E,D,O}).
    void export_snapshot(std::ostream& out) const;

private:
    void mark_deleted(std::size_t slot);
    void place(std::uint64_t slot, std::uint64_t key, std::uint32_t probe_index);
    std::uint32_t canonical_age(std::uint64_t key, std::uint32_t age, std::uint64_t slot) const;

    std::vector<Slot> slots_;
    std::vector<std::uint32_t> live_;      // occupied slot indices
    std::vector<std::uint32_t> live_pos_;  // slot index -> position in live_
    std::size_t deleted_ = 0;
    Discipline discipline_;
    std::uint64_t seed_;
    ProbeStream probe_;
};

struct SnapshotRow {
    std::size_t index = 0;
    SlotState state = SlotState::Empty;
    std::uint64_t key = 0;
    std::uint32_t age = 0;
};

/// Parses the CSV written by Table::export_snapshot.
std::vector<SnapshotRow> parse_snapshot(std::istream& in);

}  // namespace rhlab
