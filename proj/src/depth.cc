#include "gramlab/depth.h"

#include <algorithm>

#include "gramlab/error.h"

namespace gramlab {

namespace {

std::size_t annotate(const Tree &node, int depth, Side side, std::size_t begin,
                     std::vector<NodeDepth> *out) {
    const std::size_t slot = out->size();
    out->push_back({depth, side, begin, begin, false});
    std::size_t end = begin + 1;
    if (!node.is_preterminal()) {
        const std::size_t mid =
            annotate(node.children[0], left_child_depth(depth, side), Side::kLeft, begin, out);
        end = annotate(node.children[1], depth, Side::kRight, mid, out);
    }
    (*out)[slot].end = end;
    (*out)[slot].branching = end - begin >= 2;
    return end;
}

}  // namespace

std::vector<NodeDepth> annotate_depths(const Tree &tree) {
    require_binary(tree, "annotate_depths");
    std::vector<NodeDepth> out;
    annotate(tree, 1, Side::kLeft, 0, &out);
    return out;
}

int tree_depth(const Tree &tree) {
    int depth = 1;
    for (const NodeDepth &n : annotate_depths(tree)) {
        if (n.branching) depth = std::max(depth, n.depth);
    }
    return depth;
}

bool check_bound(const Tree &tree, int bound) {
    if (bound < 1) throw Error("depth bound must be >= 1");
    return tree_depth(tree) <= bound;
}

}  // namespace gramlab
