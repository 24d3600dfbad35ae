import logging

logger = logging.getLogger("blindsim")
