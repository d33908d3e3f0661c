# Discrete operators of the BGK relaxation model on a position grid x velocity Hermite modes
