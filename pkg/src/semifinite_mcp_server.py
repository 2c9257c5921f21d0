from fastmcp import FastMCP
import asyncio
import json
import time
import argparse
import sys
from typing import List, Optional, Union

# Import custom logging utilities
from utils.logging_utils import get_logger

from semifinite.algebra import _require_same_algebra, operator_from_dict
from semifinite.campaign import CHECKS, KNOWN_CHECKS, SEARCH_CHECK, CampaignConfig, run_campaign
from semifinite.functions import ConjugatePair
from semifinite.inequalities import find_xy_counterexample
from semifinite.snumbers import integrate, mu
from semifinite.suite import VerificationSuite, is_theorem

# Import prompts
from mcp_prompts import register_prompts

# Get a logger for this module
logger = get_logger("semifinite_mcp_server")

# Initialize the MCP server
mcp = FastMCP("Semifinite Young Inequality Server")

# Register prompts
mcp = register_prompts(mcp)
logger.info("Registered prompts for the Semifinite MCP Server")

# Transports `serve` can run the server on
TRANSPORTS = {
    "stdio": lambda server: server.run(transport="stdio"),
}


def _parse_operator(value, role):
    """Accept an operator document as a JSON string or an already decoded object."""
    if isinstance(value, str):
        try:
            value = json.loads(value)
        except json.JSONDecodeError as e:
            raise ValueError(f"{role} must be a valid JSON operator document: {e}") from e
    return operator_from_dict(value)


# TOOLS - Verification of inequalities and s-numbers
@mcp.tool()
async def semifinite_verify_pair(x: Union[str, dict], y: Union[str, dict], p: float) -> str:
    """Run every applicable inequality check on one pair of operators.

    Operators are JSON documents of the form
    {"blocks": [{"dim": n, "weight": w}, ...], "matrices": [[[re, im], ...], ...]}
    with one row-major list of entries per block. Both must live in the same algebra.

    Args:
        x: Operator document (JSON string or object)
        y: Operator document (JSON string or object)
        p: Exponent p > 1; q is its conjugate

    Returns:
        JSON string with the overall verdict, the failing theorem checks and every report
    """
    logger.info(f"MCP Tool call: semifinite_verify_pair with p={p}")
    start_time = time.time()

    try:
        op_x, op_y = _parse_operator(x, "x"), _parse_operator(y, "y")
        _require_same_algebra(op_x, op_y)
        reports = await asyncio.to_thread(VerificationSuite().battery, op_x, op_y, ConjugatePair.from_p(p))
        failures = [r.name for r in reports if is_theorem(r) and not r.passed]
        result = json.dumps({
            "passed": not failures,
            "failures": failures,
            "reports": [r.to_dict() for r in reports],
        }, indent=2)

        elapsed = time.time() - start_time
        logger.info(f"Verified pair with {len(reports)} reports, {len(failures)} failures in {elapsed:.2f}s")
        return result
    except Exception as e:
        elapsed = time.time() - start_time
        error_msg = f"Error verifying pair: {str(e)}"
        logger.error(f"{error_msg} after {elapsed:.2f}s")
        return error_msg

@mcp.tool()
async def semifinite_mu(operator: Union[str, dict]) -> str:
    """Compute the generalized singular values (s-numbers) of an operator.

    The result is the right-continuous step function t -> mu_t(x) given by
    its breakpoints and values, together with its integral, which equals
    the trace of |x|.

    Args:
        operator: Operator document (JSON string or object)

    Returns:
        JSON string with breakpoints, values, integral and trace of |x|
    """
    logger.info("MCP Tool call: semifinite_mu")
    start_time = time.time()

    try:
        op = _parse_operator(operator, "operator")
        f = mu(op)
        payload = f.to_dict()
        payload["integral"] = integrate(f)
        payload["total_trace"] = op.algebra.total_trace
        result = json.dumps(payload, indent=2)

        elapsed = time.time() - start_time
        logger.info(f"Computed s-numbers with {len(f.values)} steps in {elapsed:.2f}s")
        return result
    except Exception as e:
        elapsed = time.time() - start_time
        error_msg = f"Error computing s-numbers: {str(e)}"
        logger.error(f"{error_msg} after {elapsed:.2f}s")
        return error_msg

@mcp.tool()
async def semifinite_falsify(dim: int = 2, seeds: int = 1000, seed: int = 0) -> str:
    """Search for a pair violating the |xy| form of Young's inequality in singular values.

    The true inequality bounds mu_t(xy*); replacing xy* by xy breaks it in
    general. The search draws random complex matrices and exponents until a
    violation appears. A found witness includes both operators.

    Args:
        dim: Matrix size (at least 2)
        seeds: Number of random trials
        seed: Generator seed

    Returns:
        JSON string of the search report (passed means a witness was found)
    """
    logger.info(f"MCP Tool call: semifinite_falsify with dim={dim} seeds={seeds} seed={seed}")
    start_time = time.time()

    try:
        report = await asyncio.to_thread(find_xy_counterexample, dim, seeds, seed)
        result = report.to_json()

        elapsed = time.time() - start_time
        logger.info(f"Search finished ({'witness' if report.passed else 'no witness'}) in {elapsed:.2f}s")
        return result
    except Exception as e:
        elapsed = time.time() - start_time
        error_msg = f"Error searching for counterexamples: {str(e)}"
        logger.error(f"{error_msg} after {elapsed:.2f}s")
        return error_msg

@mcp.tool()
async def semifinite_campaign(
    trials: int = 20,
    seed: int = 0,
    checks: Optional[List[str]] = None,
    p_values: Optional[List[float]] = None,
    block_specs: Optional[list] = None,
) -> str:
    """Run a randomized verification campaign.

    Each trial draws fresh operators from a counter-based generator, so a
    campaign is reproducible from its seed.

    Args:
        trials: Number of trials
        seed: Campaign seed
        checks: Optional list of check names (see semifinite_list_checks)
        p_values: Optional list of exponents p > 1
        block_specs: Optional list of algebras, each [dim, weight] or [[dim, weight], ...]

    Returns:
        JSON string of the campaign result with per-check runs, failures and worst margins
    """
    logger.info(f"MCP Tool call: semifinite_campaign with trials={trials} seed={seed}")
    start_time = time.time()

    try:
        overrides = {"checks": checks, "p_values": p_values, "block_specs": block_specs}
        config = CampaignConfig.from_dict(
            dict({"trials": trials, "seed": seed}, **{k: v for k, v in overrides.items() if v is not None})
        )
        campaign = await asyncio.to_thread(run_campaign, config)
        result = json.dumps(campaign.to_dict(), indent=2, default=str)

        elapsed = time.time() - start_time
        logger.info(f"Campaign {'passed' if campaign.passed else 'failed'} in {elapsed:.2f}s")
        return result
    except Exception as e:
        elapsed = time.time() - start_time
        error_msg = f"Error running campaign: {str(e)}"
        logger.error(f"{error_msg} after {elapsed:.2f}s")
        return error_msg

@mcp.tool()
async def semifinite_list_checks() -> str:
    """List the checks a campaign can run.

    Returns:
        JSON string with one entry per check: whether it is a theorem, whether it
        depends on p and whether it needs a factor algebra
    """
    logger.info("MCP Tool call: semifinite_list_checks")
    entries = [
        {
            "name": name,
            "theorem": spec.theorem,
            "uses_p": spec.uses_p,
            "factor_only": spec.factor_only,
        }
        for name, spec in CHECKS.items()
    ]
    entries.append({"name": SEARCH_CHECK, "theorem": False, "uses_p": False, "factor_only": True})
    logger.info(f"Returning {len(entries)} of {len(KNOWN_CHECKS)} known checks")
    return json.dumps(entries, indent=2)


def serve(transport="stdio"):
    """Run the server on one of TRANSPORTS; returns a process exit code."""
    logger.info(f"Starting Semifinite MCP Server with {transport} transport")

    run = TRANSPORTS.get(transport)
    if run is None:
        logger.error(f"Unknown transport: {transport}")
        logger.info(f"Available transports: {', '.join(TRANSPORTS)}")
        return 1

    try:
        run(mcp)
    except Exception as e:
        logger.error(f"Error running transport {transport}: {e}")
        return 1
    return 0


if __name__ == "__main__":
    # Parse command line arguments
    parser = argparse.ArgumentParser(description='Semifinite MCP Server')
    parser.add_argument('--transport', type=str, default='stdio',
                        help=f'Transport type (available: {", ".join(TRANSPORTS)})')
    parser.add_argument('--list-transports', action='store_true',
                        help='List available transports')

    args, unknown = parser.parse_known_args()

    # List available transports if requested
    if args.list_transports:
        print("Available transports:")
        for transport_name in TRANSPORTS:
            print(f"  - {transport_name}")
        sys.exit(0)

    sys.exit(serve(args.transport))
