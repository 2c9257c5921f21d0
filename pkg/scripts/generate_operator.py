#!/usr/bin/env python
"""
Generate a random operator and save it as an operator document.

The operator is drawn from the counter-based generator, so the same seed,
trial and role always produce the same file. Use the output with
`semifinite_cli.py verify --x ... --y ... --p ...`.
"""
import sys
import argparse
from pathlib import Path

# Add the src directory to the Python path
project_root = Path(__file__).parent.parent
src_path = project_root / "src"
sys.path.insert(0, str(src_path))

from semifinite.algebra import TracialAlgebra, save_operator
from semifinite.generators import OperatorKind, RandomOperatorGenerator
from semifinite.snumbers import mu

def parse_block(text):
    """'dim:weight' or 'dim' (weight 1)."""
    dim, _, weight = text.partition(":")
    return int(dim), float(weight or 1.0)

def main():
    """Generate one operator and write it to disk."""
    parser = argparse.ArgumentParser(description="Generate a random operator document")
    parser.add_argument("--block", action="append", type=parse_block, dest="blocks",
                        help="Block as dim[:weight]; repeat for a direct sum (defaults to 2)")
    parser.add_argument("--kind", default=OperatorKind.GENERAL.value,
                        choices=[k.value for k in OperatorKind], help="Operator kind (defaults to general)")
    parser.add_argument("--seed", type=int, default=0, help="Generator seed (defaults to 0)")
    parser.add_argument("--trial", type=int, default=0, help="Trial index (defaults to 0)")
    parser.add_argument("--role", type=int, default=0, help="Role index; use 0 for x and 1 for y")
    parser.add_argument("--out", required=True, help="Output JSON path")
    args = parser.parse_args()

    try:
        algebra = TracialAlgebra.from_specs(args.blocks or [(2, 1.0)])
        generator = RandomOperatorGenerator(args.seed)
        x = generator.operator(algebra, args.trial, OperatorKind(args.kind), role=args.role)

        print(f"\n=== GENERATED OPERATOR ===")
        print(f"Algebra: {algebra.to_dict()}")
        print(f"Kind: {args.kind}  seed={args.seed} trial={args.trial} role={args.role}")
        f = mu(x)
        print(f"s-numbers: breakpoints={f.breakpoints.tolist()} values={f.values.tolist()}")

        path = save_operator(x, args.out)
        print(f"\nSaved operator to {path}")
        return 0
    except Exception as e:
        print(f"Error generating operator: {str(e)}")
        return 1

if __name__ == "__main__":
    sys.exit(main())
