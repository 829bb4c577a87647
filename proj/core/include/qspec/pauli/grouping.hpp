#pragma once

#include <cstddef>
#include <vector>

#include "qspec/pauli/expansion.hpp"

namespace qspec::pauli {

/// Measurement basis of one qubit inside a group.
enum class MeasureBasis : char { Z = 'Z', X = 'X', Y = 'Y' };

struct MeasurementGrouping {
    /// Term indices into the grouped expansion; the groups partition it.
    std::vector<std::vector<std::size_t>> groups;
    /// Per group, the union of member letters. Identity positions measure Z.
    std::vector<PauliString> bases;

    [[nodiscard]] std::size_t size() const noexcept { return groups.size(); }
    [[nodiscard]] MeasureBasis basis_of(std::size_t group, int qubit) const;
};

/// Greedy first-fit over terms ordered by descending |c| (ties by text order).
[[nodiscard]] MeasurementGrouping group_commuting(const PauliExpansion &e);

/// Partition and pairwise qubit-wise commutation check.
[[nodiscard]] bool is_valid_grouping(const PauliExpansion &e, const MeasurementGrouping &g);

[[nodiscard]] std::size_t count_measurements(const PauliExpansion &e, bool grouped);

} // namespace qspec::pauli
