#pragma once

#include <utility>

namespace rwg {

/// Flat indexing of the discrete triangle {0 <= j <= l <= N-1} in
/// lexicographic (j, l) order. The reflection convention ("whenever (j,l)
/// occurs with j > l it is replaced by (l,j)") lives here and only here.
struct TriangleIndex {
    int n = 0;

    int size() const { return n * (n + 1) / 2; }

    int flat(int j, int l) const {
        if (j > l) std::swap(j, l); // reflection convention
        return j * n - j * (j - 1) / 2 + (l - j);
    }

    std::pair<int, int> unflat(int idx) const {
        int j = 0;
        int row = n;
        while (idx >= row) {
            idx -= row;
            --row;
            ++j;
        }
        return {j, j + idx};
    }
};

} // namespace rwg
