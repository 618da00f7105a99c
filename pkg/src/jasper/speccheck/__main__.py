from jasper.speccheck.cli import main

main()
