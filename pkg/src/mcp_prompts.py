"""
Prompts for the Semifinite MCP Server.

This module defines reusable prompts that help LLMs drive the verification tools effectively.
"""

def register_prompts(mcp):
    """
    Register all prompts with the MCP server.

    Args:
        mcp: The MCP server instance
    """

    @mcp.prompt()
    def young_inequality_audit(p: float) -> str:
        """
        Audit Young's inequality in singular values for a user supplied pair and exponent
        """
        return f"""You are checking Young-type inequalities for operators in a finite direct sum of matrix algebras, with exponent p = {p}.

        Please proceed as follows:

        1: Ask the user for the two operators x and y as operator documents (block dims, block weights and matrices)
        2: Use the semifinite_mu tool on each operator and show the s-numbers as step functions
        3: Use the semifinite_verify_pair tool with p = {p} and report every failing theorem check with its worst margin
        4. Explain that young_sv_xy is not a theorem: a failure there is expected for some pairs and does not count against the result
        5. If the user wants to see such a failure, use the semifinite_falsify tool and present the witness operators

   """

    @mcp.prompt()
    def campaign_review(trials: int = 100, seed: int = 0) -> str:
        """
        Run a randomized campaign and summarize it
        """
        return f"""Run a randomized verification campaign of {trials} trials with seed {seed}.

        1: Use semifinite_list_checks to see which checks exist and which are theorems
        2: Use semifinite_campaign with trials={trials} and seed={seed}
        3: Summarize runs, failures and the worst margin per check, and name the worst witness of any failing theorem check

   """

    return mcp
