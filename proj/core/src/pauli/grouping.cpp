#include "qspec/pauli/grouping.hpp"

#include <algorithm>
#include <numeric>

#include "qspec/errors.hpp"

namespace qspec::pauli {

MeasureBasis MeasurementGrouping::basis_of(std::size_t group, int qubit) const {
    switch (bases.at(group).letter(qubit)) {
    case 'X':
        return MeasureBasis::X;
    case 'Y':
        return MeasureBasis::Y;
    default:
        return MeasureBasis::Z;
    }
}

MeasurementGrouping group_commuting(const PauliExpansion &e) {
    std::vector<std::size_t> order(e.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(e.terms[a].coefficient) > std::abs(e.terms[b].coefficient);
    });

    MeasurementGrouping g;
    for (const std::size_t idx : order) {
        const PauliString &p = e.terms[idx].string;
        bool placed = false;
        for (std::size_t k = 0; k < g.groups.size(); ++k) {
            // The basis accumulates member letters, so one check covers all members.
            if (g.bases[k].qubit_wise_commutes(p)) {
                g.groups[k].push_back(idx);
                g.bases[k] = PauliString(p.n_qubits(), g.bases[k].x_bits() | p.x_bits(),
                                         g.bases[k].z_bits() | p.z_bits());
                placed = true;
                break;
            }
        }
        if (!placed) {
            g.groups.push_back({idx});
            g.bases.push_back(p);
        }
    }
    return g;
}

bool is_valid_grouping(const PauliExpansion &e, const MeasurementGrouping &g) {
    if (g.groups.size() != g.bases.size()) {
        return false;
    }
    std::vector<int> seen(e.size(), 0);
    for (std::size_t k = 0; k < g.groups.size(); ++k) {
        const auto &members = g.groups[k];
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (members[i] >= e.size()) {
                return false;
            }
            ++seen[members[i]];
            const auto &pi = e.terms[members[i]].string;
            if (!g.bases[k].qubit_wise_commutes(pi)) {
                return false;
            }
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                if (!pi.qubit_wise_commutes(e.terms[members[j]].string)) {
                    return false;
                }
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

std::size_t count_measurements(const PauliExpansion &e, bool grouped) {
    return grouped ? group_commuting(e).size() : e.size();
}

} // namespace qspec::pauli
