# run the batch front-end, same as the `efold` console script

from efold_cv.cli.main import start

start()
