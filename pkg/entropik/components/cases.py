from entropik.report import CaseNodeOut, CaseTreeSection

_INDENT = "  "


def case_label(node: CaseNodeOut) -> str:
    if not node.assumptions:
        return "root"
    return node.assumptions[-1]


def case_node(node: CaseNodeOut, level: int = 0) -> list[str]:
    pad = _INDENT * level
    lines = [f"{pad}- {case_label(node)}  [{node.status}]"]
    body = pad + _INDENT + "  "
    if node.contradiction:
        lines.append(f"{body}contradiction: {node.contradiction}")
    if not node.children:
        for key, value in node.solved.items():
            lines.append(f"{body}{key} = {value}")
        for c in node.constraints:
            lines.append(f"{body}{c} = 0")
        for fact in node.facts:
            lines.append(f"{body}=> {fact}")
        for p in node.needed:
            lines.append(f"{body}undecided pivot: {p}")
    for note in node.pruned:
        lines.append(f"{body}pruned {note}")
    for child in node.children:
        lines.extend(case_node(child, level + 1))
    return lines


def case_tree(section: CaseTreeSection) -> str:
    lines = [f"Case tree ({section.leaves} leaves, depth cap {section.depth})"]
    if section.pivots:
        lines.append("pivots: " + "; ".join(section.pivots))
    else:
        lines.append("pivots: none")
    lines.extend(case_node(section.root))
    for w in section.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines)
