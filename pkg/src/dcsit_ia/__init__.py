"""Symbol-level delayed-CSIT interference alignment for the K-user SISO
interference channel and the 2 x K SISO X channel, with exact DoF analytics."""

from .analytics import (dof_ic_closed, dof_ic_recursive, dof_x_closed, dof_x_recursive,
                        limits, phase_counts, series)
from .ic_scheme import run_ic, schedule_ic
from .x_scheme import run_x, schedule_x

__all__ = ["dof_ic_closed", "dof_ic_recursive", "dof_x_closed", "dof_x_recursive",
           "limits", "phase_counts", "series", "run_ic", "schedule_ic", "run_x", "schedule_x"]
__version__ = "0.1.0"
