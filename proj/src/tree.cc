#include "gramlab/tree.h"

#include "gramlab/error.h"

namespace gramlab {

namespace {

void collect_yield(const Tree &node, std::vector<std::string> *out) {
    if (node.is_leaf()) {
        out->push_back(node.label);
        return;
    }
    for (const Tree &child : node.children) collect_yield(child, out);
}

}  // namespace

Tree preterminal(std::string label, std::string token) {
    return Tree(std::move(label), {Tree(std::move(token))});
}

std::vector<std::string> yield(const Tree &tree) {
    std::vector<std::string> tokens;
    collect_yield(tree, &tokens);
    return tokens;
}

std::size_t yield_length(const Tree &tree) {
    if (tree.is_leaf()) return 1;
    std::size_t n = 0;
    for (const Tree &child : tree.children) n += yield_length(child);
    return n;
}

std::size_t count_nodes(const Tree &tree) {
    std::size_t n = 1;
    for (const Tree &child : tree.children) n += count_nodes(child);
    return n;
}

bool is_binary(const Tree &tree) {
    if (tree.is_leaf()) return false;
    if (tree.is_preterminal()) return true;
    if (tree.children.size() != 2) return false;
    return is_binary(tree.children[0]) && is_binary(tree.children[1]);
}

void require_binary(const Tree &tree, const char *what) {
    if (!is_binary(tree)) {
        throw Error(std::string(what) +
                    ": expected a strictly binary tree over preterminals");
    }
}

}  // namespace gramlab
