from hyperkgc.interfaces.cli.main import run

run()
