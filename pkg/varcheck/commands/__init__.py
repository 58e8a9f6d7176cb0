from varcheck.commands.diagnose import diagnose_command
from varcheck.commands.fit import fit_command
from varcheck.commands.mc import mc_command
from varcheck.commands.oracle import oracle_command
from varcheck.commands.simulate import simulate_command

__all__ = ["diagnose_command", "fit_command", "mc_command", "oracle_command", "simulate_command"]
