import os
from dotenv import load_dotenv

# Environment selection (the first CLI argument is a subcommand, so the file is chosen by BGK_ENV)
env_selection = os.getenv('BGK_ENV', 'env')

if env_selection == 'dev':
    env_file = '.dev'
elif env_selection == 'prod':
    env_file = '.prod'
else:
    env_file = '.env'

# Load the selected environment file
load_dotenv(env_file, override=True)

# Logging configuration
logging_path = os.getenv('logging_path', 'logs/app.log')
logging_file_size = int(os.getenv('logging_file_size', '10485760'))  # 10MB default
logging_backup_count = int(os.getenv('logging_backup_count', '5'))
logging_level = os.getenv('logging_level', 'INFO')

# Output configuration
output_dir = os.getenv('output_dir', 'results')
float_digits = int(os.getenv('float_digits', '17'))

# Reproducibility
arnoldi_seed = int(os.getenv('arnoldi_seed', '1234'))

# Linear algebra size thresholds (number of unknowns N*K)
dense_limit = int(os.getenv('dense_limit', '6000'))
svd_limit = int(os.getenv('svd_limit', '3000'))
expm_oracle_limit = int(os.getenv('expm_oracle_limit', '2000'))

# Desk-scale discretization defaults
default_N = int(os.getenv('default_N', '200'))
default_K = int(os.getenv('default_K', '24'))

# Worker pool for per-h jobs
worker_count = int(os.getenv('worker_count', '1'))
