using System;
using System.Web.UI;
using Shop.Business.Models;
using Shop.Business.Services;

namespace Shop.Web.Pages
{
    public partial class Checkout : Page
    {
        private IOrderService orderService = new OrderService();
        private CustomerService customers = new CustomerService();

        protected void btnPay_Click(object sender, EventArgs e)
        {
            int customerId = int.Parse(txtCustomer.Text);
            Customer customer = customers.Find(customerId);
            orderService.Checkout(customer.Id);
            customers.GetRepository().Touch(customerId);
            ShowConfirmation(customerId);
        }

        private void ShowConfirmation(int customerId)
        {
            lblStatus.Text = "Thank you, customer #" + customerId;
        }
    }
}
