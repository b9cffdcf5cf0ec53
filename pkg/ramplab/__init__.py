"""Binary-response estimation: LPM, ramp NLS, probit and logit, with APEs."""

from ramplab.config import APP_VERSION as __version__
