"""Write the canonical node documents into fixtures/ (deterministic)."""
import argparse
from pathlib import Path

from scaledquat import examples as ex
from scaledquat.constructors import theta_builder
from scaledquat.core import AlgebraContext
from scaledquat.io import NodeDocument, save_matrix, save_node
from scaledquat.matrix import HtMatrix
from scaledquat.structured import Kind, solve_certificate


def build():
    docs = {}
    node, cert, sig = ex.brune_example()
    docs["brune"] = NodeDocument(node.t, node, sig.J, cert.H, cert.kind)
    node, cert = ex.line_blaschke_example()
    docs["blaschke_line"] = NodeDocument(node.t, node, cert.J, cert.H, cert.kind)
    node, cert = ex.circle_blaschke_example()
    docs["blaschke_circle"] = NodeDocument(node.t, node, cert.J, cert.H, cert.kind)
    node, cert, sig = ex.line_pair_example()
    docs["blaschke_pair"] = NodeDocument(node.t, node, sig.J, cert.H, cert.kind)
    node, J = ex.blaschke_product_example()
    cert = solve_certificate(node, J, Kind.LINE_JUNITARY)
    docs["blaschke_product"] = NodeDocument(node.t, node, J, cert.H, cert.kind)
    ctx = AlgebraContext(-1.0)
    alphas = [ex.quaternion(0.3, 0.1, 0.2, 0.0), ex.quaternion(-0.2, 0.3, 0.0, 0.1),
              ex.quaternion(0.1, -0.4, 0.1, 0.2)]
    node, cert = theta_builder(alphas, ctx)
    docs["theta"] = NodeDocument(node.t, node, cert.J, cert.H, cert.kind)
    node, cert = ex.line_antisym_example()
    docs["line_antisym"] = NodeDocument(node.t, node, None, cert.H, cert.kind)
    node, cert = ex.circle_antisym_example()
    docs["circle_antisym"] = NodeDocument(node.t, node, None, cert.H, cert.kind)
    node, cert = ex.circle_antisym_pair_example()
    docs["circle_antisym_pair"] = NodeDocument(node.t, node, None, cert.H, cert.kind)
    node, cert = ex.double_x_example()
    docs["double_x"] = NodeDocument(node.t, node, None, cert.H, cert.kind,
                                    {"note": "non-minimal realization"})
    # unstructured node without a certificate, for solve-h
    node, _ = ex.circle_blaschke_example(t=0.5)
    docs["blaschke_circle_uncertified"] = NodeDocument(node.t, node)
    return docs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "fixtures"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, doc in build().items():
        doc.metadata = {"fixture": name, **doc.metadata}
        save_node(out / f"{name}.json", doc)
        print(f"wrote {name}.json")
    ctx = AlgebraContext(-1.0)
    save_matrix(out / "subspace_first.json", HtMatrix.real([[1], [0], [0]], ctx), {"role": "first coordinate"})
    print("wrote subspace_first.json")


if __name__ == "__main__":
    main()
